#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qgreeks {

enum class SampleSource { PseudoRandom, Sobol, ScrambledSobol };

// D x N block of uniforms in (0,1), stored point-major.
struct SampleMatrix {
    int dims = 0;
    std::int64_t count = 0;
    SampleSource source = SampleSource::PseudoRandom;
    int replicate = 0; // meaningful for ScrambledSobol only

    std::vector<double> values; // values[p * dims + d]

    double at(std::int64_t point, int dim) const { return values[point * dims + dim]; }
    std::span<const double> point(std::int64_t p) const {
        return {values.data() + p * dims, static_cast<std::size_t>(dims)};
    }
};

// (seed, replicate) fully determines one Owen-scrambled replicate.
struct ScrambleSeed {
    std::uint64_t seed = 0;
    int replicate = 1;
};

// Sobol' direction numbers, 32 bits per dimension.
// Text format, one line per dimension d >= 2: `d s a m_1 ... m_s`.
// Dimension 1 (van der Corput) is implicit.
class SobolTable {
public:
    static const SobolTable& joe_kuo_default(); // embedded Joe-Kuo table, 192 dimensions
    static SobolTable parse(std::istream& in);
    static SobolTable load_file(const std::string& path);

    int max_dims() const { return dims_; }
    // v_k for dimension `dim` (1-based), bit k (1-based, k <= 32)
    std::uint32_t direction(int dim, int k) const { return v_[(dim - 1) * 32 + (k - 1)]; }

private:
    int dims_ = 0;
    std::vector<std::uint32_t> v_;
};

// Deterministic Sobol' sequence with natural (binary-expansion) indexing:
// coordinate of point i is the XOR of the direction numbers selected by the
// bits of i. Index 0 is the all-zeros point.
class SobolSequence {
public:
    explicit SobolSequence(int dims, const SobolTable& table = SobolTable::joe_kuo_default(),
                           std::uint64_t start_index = 1);

    int dims() const { return dims_; }
    std::uint64_t next_index() const { return next_index_; }

    std::uint32_t coordinate_bits(std::uint64_t index, int dim) const; // dim 1-based
    void point(std::uint64_t index, std::span<double> out) const;
    void next(std::span<double> out);

private:
    const SobolTable* table_;
    int dims_;
    std::uint64_t next_index_;
};

// Nested uniform scramble of a 32-bit Sobol' output: each binary-tree node
// (depth, prefix) contributes an independent hash-derived flip bit.
std::uint32_t owen_scramble_bits(std::uint32_t x, std::uint64_t column_key);
std::uint64_t owen_column_key(const ScrambleSeed& seed, int dim);

SampleMatrix pseudo_uniforms(int dims, std::int64_t count, std::uint64_t seed);
SampleMatrix sobol_uniforms(int dims, std::int64_t count,
                            const SobolTable& table = SobolTable::joe_kuo_default(),
                            std::uint64_t start_index = 1);
SampleMatrix owen_scramble(int dims, std::int64_t count, const ScrambleSeed& seed,
                           const SobolTable& table = SobolTable::joe_kuo_default(),
                           std::uint64_t start_index = 0);

// Sequential stream of uniform points; one instance per replicate.
class PointSource {
public:
    virtual ~PointSource() = default;
    virtual void next(std::span<double> out) = 0;
    virtual void reset() = 0;
    virtual int dims() const = 0;
};

std::unique_ptr<PointSource> make_pseudo_source(int dims, std::uint64_t seed);
std::unique_ptr<PointSource> make_sobol_source(int dims, std::uint64_t start_index = 1);
std::unique_ptr<PointSource> make_scrambled_source(int dims, const ScrambleSeed& seed,
                                                   std::uint64_t start_index = 0);

} // namespace qgreeks
