#include "qgreeks/sampling.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qgreeks/seeding.hpp"

namespace qgreeks {

namespace detail {
extern const char* const kJoeKuoTable;
}

namespace {

constexpr int kBits = 32;
constexpr double kInv32 = 0x1p-32;

void check_dims_count(int dims, std::int64_t count) {
    if (dims < 1) throw std::invalid_argument("sample matrix: dims must be >= 1");
    if (count < 1) throw std::invalid_argument("sample matrix: count must be >= 1");
}

} // namespace

// --- SobolTable --------------------------------------------------------------

SobolTable SobolTable::parse(std::istream& in) {
    // Rows must be consecutive starting at d = 2; dimension 1 is built here.
    std::vector<std::uint32_t> v;
    v.resize(kBits);
    for (int k = 1; k <= kBits; ++k) {
        v[k - 1] = 1u << (kBits - k);
    }

    int expected = 2;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        long long d = 0;
        if (!(row >> d)) continue; // blank line
        if (d != expected) {
            throw std::invalid_argument("direction-number table: expected dimension " +
                                        std::to_string(expected));
        }
        int s = 0;
        unsigned long long a = 0;
        if (!(row >> s >> a) || s < 1) {
            throw std::invalid_argument("direction-number table: bad row for dimension " +
                                        std::to_string(d));
        }
        std::vector<std::uint64_t> m(static_cast<std::size_t>(s));
        for (int k = 0; k < s; ++k) {
            if (!(row >> m[k]) || m[k] % 2 == 0 || m[k] >= (1ull << (k + 1))) {
                throw std::invalid_argument("direction-number table: bad m values for dimension " +
                                            std::to_string(d));
            }
        }
        std::vector<std::uint32_t> col(kBits);
        for (int k = 1; k <= std::min(s, kBits); ++k) {
            col[k - 1] = static_cast<std::uint32_t>(m[k - 1] << (kBits - k));
        }
        for (int k = s + 1; k <= kBits; ++k) {
            // m_k = 2^s m_{k-s} ^ m_{k-s} ^ sum_j a_j 2^j m_{k-j}, in shifted form
            std::uint32_t x = col[k - s - 1] ^ (col[k - s - 1] >> s);
            for (int j = 1; j < s; ++j) {
                if ((a >> (s - 1 - j)) & 1ull) x ^= col[k - j - 1];
            }
            col[k - 1] = x;
        }
        v.insert(v.end(), col.begin(), col.end());
        ++expected;
    }
    if (expected == 2) throw std::invalid_argument("direction-number table: no rows");

    SobolTable table;
    table.dims_ = expected - 1;
    table.v_ = std::move(v);
    return table;
}

SobolTable SobolTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("direction-number table: cannot open " + path);
    return parse(in);
}

const SobolTable& SobolTable::joe_kuo_default() {
    static const SobolTable table = [] {
        std::istringstream in(detail::kJoeKuoTable);
        return parse(in);
    }();
    return table;
}

// --- SobolSequence -----------------------------------------------------------

SobolSequence::SobolSequence(int dims, const SobolTable& table, std::uint64_t start_index)
    : table_(&table), dims_(dims), next_index_(start_index) {
    if (dims < 1) throw std::invalid_argument("sobol: dims must be >= 1");
    if (dims > table.max_dims()) {
        throw std::invalid_argument("sobol: dims " + std::to_string(dims) +
                                    " exceeds direction-number table (" +
                                    std::to_string(table.max_dims()) + ")");
    }
}

std::uint32_t SobolSequence::coordinate_bits(std::uint64_t index, int dim) const {
    std::uint32_t x = 0;
    int k = 1;
    while (index != 0) {
        if (index & 1ull) x ^= table_->direction(dim, k);
        index >>= 1;
        ++k;
    }
    return x;
}

void SobolSequence::point(std::uint64_t index, std::span<double> out) const {
    for (int d = 1; d <= dims_; ++d) {
        out[d - 1] = coordinate_bits(index, d) * kInv32;
    }
}

void SobolSequence::next(std::span<double> out) {
    point(next_index_, out);
    ++next_index_;
}

// --- Owen scrambling ---------------------------------------------------------

std::uint64_t owen_column_key(const ScrambleSeed& seed, int dim) {
    return derive_seed(derive_seed(seed.seed, static_cast<std::uint64_t>(seed.replicate)),
                       static_cast<std::uint64_t>(dim));
}

std::uint32_t owen_scramble_bits(std::uint32_t x, std::uint64_t column_key) {
    // Bit b (from the most significant) is flipped by a hash of the b-digit
    // prefix, which identifies the node of the scrambling tree.
    std::uint64_t y = x;
    const std::uint64_t wide = x;
    for (int b = 0; b < kBits; ++b) {
        const std::uint64_t prefix = wide >> (kBits - b);
        const std::uint64_t h = mix64(column_key ^ (static_cast<std::uint64_t>(b + 1) << 48) ^ prefix);
        y ^= (h >> 63) << (kBits - 1 - b);
    }
    return static_cast<std::uint32_t>(y);
}

// --- matrix generation -------------------------------------------------------

SampleMatrix pseudo_uniforms(int dims, std::int64_t count, std::uint64_t seed) {
    check_dims_count(dims, count);
    SampleMatrix m{dims, count, SampleSource::PseudoRandom, 0, {}};
    m.values.resize(static_cast<std::size_t>(dims) * count);
    std::mt19937_64 rng(seed);
    for (auto& u : m.values) {
        // 53-bit cell center keeps every draw strictly inside (0,1).
        u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    }
    return m;
}

SampleMatrix sobol_uniforms(int dims, std::int64_t count, const SobolTable& table,
                            std::uint64_t start_index) {
    check_dims_count(dims, count);
    SobolSequence seq(dims, table, start_index);
    SampleMatrix m{dims, count, SampleSource::Sobol, 0, {}};
    m.values.resize(static_cast<std::size_t>(dims) * count);
    for (std::int64_t p = 0; p < count; ++p) {
        seq.next({m.values.data() + p * dims, static_cast<std::size_t>(dims)});
    }
    return m;
}

SampleMatrix owen_scramble(int dims, std::int64_t count, const ScrambleSeed& seed,
                           const SobolTable& table, std::uint64_t start_index) {
    check_dims_count(dims, count);
    SobolSequence seq(dims, table, start_index);
    SampleMatrix m{dims, count, SampleSource::ScrambledSobol, seed.replicate, {}};
    m.values.resize(static_cast<std::size_t>(dims) * count);
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(dims));
    for (int d = 1; d <= dims; ++d) keys[d - 1] = owen_column_key(seed, d);
    for (std::int64_t p = 0; p < count; ++p) {
        const std::uint64_t index = start_index + static_cast<std::uint64_t>(p);
        for (int d = 1; d <= dims; ++d) {
            const std::uint32_t x = seq.coordinate_bits(index, d);
            const std::uint32_t y = owen_scramble_bits(x, keys[d - 1]);
            // cell center: scrambled digits identify the cell, not a point
            m.values[p * dims + d - 1] = (static_cast<double>(y) + 0.5) * kInv32;
        }
    }
    return m;
}

// --- streaming sources -------------------------------------------------------

namespace {

class PseudoSource final : public PointSource {
public:
    PseudoSource(int dims, std::uint64_t seed) : dims_(dims), seed_(seed), rng_(seed) {}

    void next(std::span<double> out) override {
        for (int d = 0; d < dims_; ++d) {
            out[d] = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1p-53;
        }
    }
    void reset() override { rng_.seed(seed_); }
    int dims() const override { return dims_; }

private:
    int dims_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

class SobolSource final : public PointSource {
public:
    SobolSource(int dims, std::uint64_t start) : seq_(dims), start_(start), index_(start) {}

    void next(std::span<double> out) override {
        seq_.point(index_, out);
        ++index_;
    }
    void reset() override { index_ = start_; }
    int dims() const override { return seq_.dims(); }

private:
    SobolSequence seq_;
    std::uint64_t start_;
    std::uint64_t index_;
};

class ScrambledSource final : public PointSource {
public:
    ScrambledSource(int dims, const ScrambleSeed& seed, std::uint64_t start)
        : seq_(dims), start_(start), index_(start) {
        keys_.resize(static_cast<std::size_t>(dims));
        for (int d = 1; d <= dims; ++d) keys_[d - 1] = owen_column_key(seed, d);
    }

    void next(std::span<double> out) override {
        for (int d = 1; d <= seq_.dims(); ++d) {
            const std::uint32_t y = owen_scramble_bits(seq_.coordinate_bits(index_, d), keys_[d - 1]);
            out[d - 1] = (static_cast<double>(y) + 0.5) * kInv32;
        }
        ++index_;
    }
    void reset() override { index_ = start_; }
    int dims() const override { return seq_.dims(); }

private:
    SobolSequence seq_;
    std::vector<std::uint64_t> keys_;
    std::uint64_t start_;
    std::uint64_t index_;
};

} // namespace

std::unique_ptr<PointSource> make_pseudo_source(int dims, std::uint64_t seed) {
    check_dims_count(dims, 1);
    return std::make_unique<PseudoSource>(dims, seed);
}

std::unique_ptr<PointSource> make_sobol_source(int dims, std::uint64_t start_index) {
    return std::make_unique<SobolSource>(dims, start_index);
}

std::unique_ptr<PointSource> make_scrambled_source(int dims, const ScrambleSeed& seed,
                                                   std::uint64_t start_index) {
    return std::make_unique<ScrambledSource>(dims, seed, start_index);
}

} // namespace qgreeks
