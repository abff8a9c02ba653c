#ifndef DPSIM_RANDOMNESS_H
#define DPSIM_RANDOMNESS_H

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dpsim/puf.h"

namespace dpsim {

// One 0/1 value per element.
using BitSequence = std::vector<std::uint8_t>;

BitSequence bits_from_string(const std::string& s);
std::string bits_to_string(const BitSequence& b);

// Each position mod cacheline_bits as a fixed-width big-endian binary
// number (log2(cacheline_bits) bits), responses in order.
BitSequence positions_to_bitstream(const std::vector<PufResponse>& responses, std::uint32_t cacheline_bits = 512);

using Prewhitener = std::function<BitSequence(const BitSequence&)>;

// Classic extractor: 01 -> 0, 10 -> 1, 00 and 11 dropped.
BitSequence von_neumann(const BitSequence& bits, const Prewhitener& prewhiten = nullptr);

struct NistParams {
    double alpha = 0.01;
    std::size_t block_frequency_m = 128;
    std::size_t non_overlapping_m = 9;
    std::size_t non_overlapping_blocks = 8;
    std::size_t overlapping_m = 9;
    std::size_t linear_complexity_m = 500;
    std::size_t serial_m = 16;
    std::size_t approximate_entropy_m = 10;
    std::size_t maurer_L = 0;  // 0: choose from n
    std::size_t maurer_Q = 0;  // 0: 10 * 2^L
    // Excursion tests need J >= max(0.005 sqrt(n), min_cycles).
    std::size_t excursion_min_cycles = 500;
    // Multi-p-value tests pass iff min p >= alpha / k.
    bool bonferroni = true;
};

struct NistResult {
    std::string test_name;
    std::vector<double> p_values;  // one entry for single-statistic tests
    bool skipped = false;
    std::string reason;
    bool pass = false;
    double threshold = 0.01;  // per-p threshold applied

    double min_p() const;
    double mean_p() const;
};

// The 15 tests in the order monobit .. random_excursion_variant.
std::vector<NistResult> nist_suite(const BitSequence& bits, const NistParams& p = NistParams{});

// Individual tests, exposed for known-answer checks.
NistResult monobit(const BitSequence& b, const NistParams& p = NistParams{});
NistResult block_frequency(const BitSequence& b, const NistParams& p = NistParams{});
NistResult runs(const BitSequence& b, const NistParams& p = NistParams{});
NistResult longest_run(const BitSequence& b, const NistParams& p = NistParams{});
NistResult matrix_rank(const BitSequence& b, const NistParams& p = NistParams{});
NistResult dft(const BitSequence& b, const NistParams& p = NistParams{});
NistResult non_overlapping_template(const BitSequence& b, const NistParams& p = NistParams{});
NistResult overlapping_template(const BitSequence& b, const NistParams& p = NistParams{});
NistResult maurer_universal(const BitSequence& b, const NistParams& p = NistParams{});
NistResult linear_complexity(const BitSequence& b, const NistParams& p = NistParams{});
NistResult serial(const BitSequence& b, const NistParams& p = NistParams{});
NistResult approximate_entropy(const BitSequence& b, const NistParams& p = NistParams{});
NistResult cumulative_sums(const BitSequence& b, const NistParams& p = NistParams{});
NistResult random_excursions(const BitSequence& b, const NistParams& p = NistParams{});
NistResult random_excursions_variant(const BitSequence& b, const NistParams& p = NistParams{});

// Helpers with known answers.
double igamc(double a, double x);
int berlekamp_massey(const std::uint8_t* s, std::size_t n);
int gf2_rank(std::vector<std::uint32_t> rows, int cols);
std::vector<std::vector<std::uint8_t>> aperiodic_templates(int m);

// Bits of the extracted stream produced from `segments` of a device.
struct DeviceStream {
    BitSequence raw;
    BitSequence extracted;
    std::uint64_t responses = 0;
    std::uint64_t positions = 0;
};

DeviceStream device_stream(const PufDevice& dev, const std::vector<std::uint64_t>& segments,
                           std::uint64_t trial, unsigned threads);

}  // namespace dpsim

#endif
