#include <string>
#include <vector>

#include "qgreeks/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qgreeks::run_cli(args);
}
