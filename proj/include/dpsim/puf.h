#ifndef DPSIM_PUF_H
#define DPSIM_PUF_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpsim/address.h"
#include "dpsim/config.h"
#include "dpsim/primitives.h"
#include "dpsim/variation.h"

namespace dpsim {

// Sorted, strictly increasing bit positions inside the segment.
struct PufResponse {
    std::vector<std::uint32_t> positions;

    bool operator==(const PufResponse&) const = default;
};

struct FilterPolicy {
    std::uint32_t reads = 1;
    double keep_threshold = 1.0;
};

void check_filter(const FilterPolicy& f);

struct Challenge {
    Address segment_start;
    std::uint64_t segment_bytes = 8192;
    PrimitiveTag primitive = PrimitiveTag::UC_PLA;
};

double jaccard(const PufResponse& a, const PufResponse& b);

// Keeps positions seen in at least threshold * N of the reads.
PufResponse filter_responses(const std::vector<PufResponse>& reads, double threshold);

// Anything that answers a segment challenge for a given noise trial.
class PufModel {
  public:
    virtual ~PufModel() = default;
    virtual std::uint64_t segment_count() const = 0;
    virtual std::uint64_t segment_bits() const = 0;
    // Segments that will be read; read() on unprepared segments is slower
    // but still correct. Not thread safe.
    virtual void prepare(const std::vector<std::uint64_t>& segments) = 0;
    virtual PufResponse read(std::uint64_t segment, std::uint64_t trial) const = 0;
    virtual std::string name() const = 0;

    // N reads at trials base .. base+N-1, then filtered.
    PufResponse evaluate(std::uint64_t segment, const FilterPolicy& f, std::uint64_t trial_base) const;
};

// Dataplant PUF. A segment's bits are (f + noise) > 0 with f the fixed
// per-cell decision level; only cells with |f| inside the noise reach need
// per-trial draws.
class PufDevice : public PufModel {
  public:
    explicit PufDevice(const DramConfig& c, PrimitiveTag primitive = PrimitiveTag::UC_PLA);

    std::uint64_t segment_count() const override { return segments_; }
    std::uint64_t segment_bits() const override { return seg_bits_; }
    void prepare(const std::vector<std::uint64_t>& segments) override;
    PufResponse read(std::uint64_t segment, std::uint64_t trial) const override;
    std::string name() const override;

    PufResponse evaluate_challenge(const Challenge& ch, const FilterPolicy& f, std::uint64_t trial_base) const;

    // Cells whose outcome can change between trials.
    struct Ambiguous {
        std::uint32_t position;
        std::uint32_t column;
        double level;
        std::uint64_t noise_prefix;
    };
    struct SegmentModel {
        std::vector<std::uint32_t> sure_zero;
        std::vector<Ambiguous> ambiguous;
    };
    SegmentModel build_model(std::uint64_t segment) const;

    // Decision level of one cell (includes the SA offset share for UC-PLA).
    double level(const Address& a) const;

    const DramConfig& config() const { return cfg_; }
    PrimitiveTag primitive() const { return prim_; }

  private:
    PufResponse read_model(const SegmentModel& m, std::uint64_t trial) const;

    DramConfig cfg_;
    PrimitiveTag prim_;
    VariationSampler sampler_;
    std::uint64_t segments_;
    std::uint64_t seg_rows_;
    std::uint64_t seg_bits_;
    double reach_;       // |f| beyond which noise cannot flip a cell
    double u_candidate_; // uniforms above this are sure ones
    std::map<std::uint64_t, SegmentModel> cache_;
};

// Comparison foil modelled on a tRCD-reduction latency PUF: a sparse set of
// weak cells, each failing with p = sigmoid(strength + kappa * (T - T_enroll)).
// Not a validated chip model.
class LatencyPuf : public PufModel {
  public:
    explicit LatencyPuf(const DramConfig& c);

    std::uint64_t segment_count() const override { return segments_; }
    std::uint64_t segment_bits() const override { return seg_bits_; }
    void prepare(const std::vector<std::uint64_t>& segments) override;
    PufResponse read(std::uint64_t segment, std::uint64_t trial) const override;
    std::string name() const override { return "latency_puf"; }

    struct Weak {
        std::uint32_t position;
        double p_fail;
        std::uint64_t trial_prefix;
        std::uint32_t column;
    };
    std::vector<Weak> weak_cells(std::uint64_t segment) const;

  private:
    DramConfig cfg_;
    std::uint64_t segments_, seg_rows_, seg_bits_;
    std::map<std::uint64_t, std::vector<Weak>> cache_;
};

// ---------------------------------------------------------------------------
// Experiments

struct JaccardReport {
    std::vector<double> intra;
    std::vector<double> inter;
    std::uint64_t pair_count = 0;
};

struct PairSampling {
    std::uint64_t seed = 0;
    std::uint64_t pairs = 10000;
    unsigned threads = 1;
};

// Segments used by the sampled pairs, drawn from a population of `population`.
std::vector<std::uint64_t> pick_segments(std::uint64_t device_segments, std::uint64_t population,
                                         std::uint64_t seed);

JaccardReport intra_inter_distributions(PufModel& m, const std::vector<std::uint64_t>& population,
                                        const FilterPolicy& f, const PairSampling& s);

// Same-segment pairs: first response from `enrolled`, second from `probe`.
std::vector<double> cross_intra(PufModel& enrolled, PufModel& probe,
                                const std::vector<std::uint64_t>& population, const FilterPolicy& f,
                                const PairSampling& s);

struct TemperaturePoint {
    double temperature;
    std::vector<double> intra;
};

std::vector<TemperaturePoint> temperature_sweep(const DramConfig& base, bool latency_foil,
                                                const std::vector<double>& temps,
                                                const std::vector<std::uint64_t>& population,
                                                const FilterPolicy& f, const PairSampling& s);

// Before/after pairs with offsets perturbed by `drift`.
std::vector<double> aging_experiment(const DramConfig& base, double drift,
                                     const std::vector<std::uint64_t>& population, const FilterPolicy& f,
                                     const PairSampling& s);

// Runs N real primitive evaluations on one subarray row. UE-SA without
// writeback leaves the cells untouched; UC-PLA overwrites the row.
PufResponse evaluate_on_subarray(Subarray& s, std::uint32_t row, PrimitiveTag prim, const FilterPolicy& f);

bool authenticate(const PufResponse& enrolled, const PufResponse& probe);

struct AuthStats {
    std::uint64_t trials = 0;
    std::uint64_t false_rejects = 0;
    std::uint64_t false_accepts = 0;
    double frr() const { return trials ? double(false_rejects) / trials : 0.0; }
    double far() const { return trials ? double(false_accepts) / trials : 0.0; }
};

AuthStats estimate_frr_far(PufModel& m, const std::vector<std::uint64_t>& population, const FilterPolicy& f,
                           const PairSampling& s);

struct Repeatability {
    std::uint64_t reads = 0;
    std::uint64_t matching = 0;
    double fraction() const { return reads ? double(matching) / reads : 0.0; }
};

// Single reads compared with a per-segment reference built from `reference`.
Repeatability repeatability(PufModel& m, const std::vector<std::uint64_t>& segments,
                            const FilterPolicy& reference, std::uint32_t reads_per_segment, unsigned threads);

// Fraction of flagged cells over the given segments (single read each).
double flagged_fraction(PufModel& m, const std::vector<std::uint64_t>& segments, unsigned threads);

enum class PufKind { LatencyPuf, PreLatPuf, DataplantFiltered, DataplantNoFilter };
std::string to_string(PufKind k);

// Duration in ns of one challenge evaluation.
double evaluation_time(PufKind kind, const FilterPolicy& f, const DramConfig& c);
// per_read_cost in ns, fitted once so that an unfiltered Dataplant evaluation
// matches the measured platform round.
double per_read_cost_ns(const DramConfig& c);

struct RetentionResult {
    double wait_hours = 0;
    double temperature = 0;
    std::uint64_t cells = 0;
    std::uint64_t covered = 0;
    double coverage() const { return cells ? double(covered) / cells : 0.0; }
    std::vector<PufResponse> responses;  // zero bits among covered cells
    std::vector<double> jaccard_vs_uc_pla;
};

// Disables refresh for `wait_hours` from all-zeros and from all-ones images;
// a cell is covered when both images read back the same bit.
RetentionResult retention_emulation(const DramConfig& c, double wait_hours, double temperature,
                                    const std::vector<std::uint64_t>& segments, std::uint64_t trial,
                                    unsigned threads);

}  // namespace dpsim

#endif
