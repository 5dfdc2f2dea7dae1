#pragma once

// CSV and JSON output. Every CSV starts with a "# delayrc <kind> v1" line
// followed by the column header.

#include <ostream>
#include <string>
#include <vector>

#include "delayrc/analysis.hpp"
#include "delayrc/config.hpp"
#include "delayrc/mmf.hpp"
#include "delayrc/readout.hpp"
#include "delayrc/reservoir.hpp"
#include "delayrc/sysid.hpp"

namespace delayrc {

inline constexpr int kCsvSchemaVersion = 1;

void write_state_csv(std::ostream& out, const StateMatrix& states);            // k,m,value
void write_spectrum_csv(std::ostream& out, const CapacitySpectrum& spectrum);  // l,C_l
void write_s_tilde_csv(std::ostream& out, const ModifiedStateMatrix& s_tilde); // l,n,value
void write_comparison_csv(std::ostream& out, const SpectrumComparison& cmp);
void write_ab_sweep_csv(std::ostream& out, const SweepGrid& grid);             // a,b,MC,status
void write_grid_csv(std::ostream& out, const SweepGrid& grid, const AgreementReport& report);
void write_eta_scan_csv(std::ostream& out, const std::vector<EtaScanRow>& rows);

/// The resolved configuration as a JSON object.
std::string config_json(const RunConfig& cfg);

/// {mc_total, lambda, cutoff, config}
std::string spectrum_summary_json(const CapacitySpectrum& spectrum, const RunConfig& cfg);
std::string comparison_summary_json(const SpectrumComparison& cmp, const RunConfig& cfg);
std::string agreement_json(const AgreementReport& report, const RunConfig& cfg);
std::string linearization_json(const Linearization& lin);  // {a, b, c, warnings}
std::string benchmark_json(const std::vector<BenchmarkPoint>& points, const RunConfig& cfg);

}  // namespace delayrc
