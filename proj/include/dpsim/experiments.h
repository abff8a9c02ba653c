#ifndef DPSIM_EXPERIMENTS_H
#define DPSIM_EXPERIMENTS_H

#include <string>
#include <vector>

#include "dpsim/config.h"
#include "dpsim/report.h"

namespace dpsim {

struct RunOptions {
    bool full = false;   // larger Monte Carlo counts
    unsigned threads = 1;
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::string reproduces;  // table or figure shape of the primary output
};

// Stable order.
const std::vector<ExperimentInfo>& list_experiments();
bool has_experiment(const std::string& name);

// Closest known name by edit distance, empty when nothing is close.
std::string suggest_experiment(const std::string& name);

// Throws std::invalid_argument for an unknown name. The seed is taken from
// cfg.variation.master_seed; threads never change the output.
Report run_experiment(const std::string& name, const DramConfig& cfg, const RunOptions& opts = RunOptions{});

}  // namespace dpsim

#endif
