#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdcont/continuation.hpp"
#include "rdcont/rd_problem.hpp"
#include "rdcont/time_integration.hpp"

namespace rdcont {

enum class ExperimentKind {
    Bifurcation,
    FoldScan,
    CriticalLength,
    TuringRegion,
    Dispersion,
    Simulate,
};

struct SweepBlock {
    std::string param;  // "gamma", "beta0", "a0", "n", "theta"
    double min = 0.0;
    double max = 1.0;
    int count = 1;
    bool log_spacing = false;

    std::vector<double> values() const;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Declarative description of one run, deserialized from a JSON document.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Bifurcation;
    ModelKind model_kind = ModelKind::Schnakenberg;
    double gamma = 1.0;
    double d = 1.0 / 40.0;
    KineticParams params;
    int het_n = 1;
    double theta = 0.0;  // fixed theta for simulate / turing-region

    std::vector<SweepBlock> sweeps;
    std::vector<double> theta_targets;  // critical-length stage-1 targets

    int n_points = 201;
    NewtonSettings newton;
    ContinuationSettings continuation;
    IntegrationSettings integration;
    double gamma_search_min = 1e-3;
    double gamma_search_max = 200.0;
    int max_mode = 10;

    bool bidirectional = false;
    bool trace_patterned = true;

    std::filesystem::path output_dir = "out";
    int workers = 1;  // overridden by TC_WORKERS when set
    std::uint32_t seed = 1;

    ModelSpec make_model() const;
    ModelSpec make_model(double gamma_value, double kinetic_value) const;

    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

/// Applies a dotted "key=value" override (e.g. "model.gamma=3.61") to the
/// JSON document before parsing.
std::string apply_override(const std::string& json_text,
                           const std::string& assignment);

/// Effective worker-pool size: the TC_WORKERS environment variable when
/// set to a positive integer, otherwise the configured value.
int worker_count(const ExperimentConfig& config);

struct ExperimentStatus {
    bool ok = true;
    int cells_unresolved = 0;
    std::string message;
};

enum class CellStatus { Fold, NoFold, Unresolved };

struct ScanCell {
    double param1 = 0.0;
    double param2 = 0.0;
    CellStatus status = CellStatus::Unresolved;
    double theta_plus = 0.0;  // valid when status == Fold
};

struct ScanResult {
    std::vector<double> axis1, axis2;
    std::vector<ScanCell> cells;  // row-major over (axis1, axis2)
};

enum class CriticalLengthStatus { Found, BaseStateLost, NotFound };

struct CriticalLengthRow {
    double theta = 0.0;
    double kinetic_param = 0.0;
    CriticalLengthStatus status = CriticalLengthStatus::NotFound;
    double gamma_critical = 0.0;
    double length = 0.0;  // sqrt(gamma_critical)
};

ExperimentStatus run_bifurcation(const ExperimentConfig& config);
ExperimentStatus run_fold_scan(const ExperimentConfig& config,
                               ScanResult* result_out = nullptr);
ExperimentStatus run_critical_length(
    const ExperimentConfig& config,
    std::vector<CriticalLengthRow>* rows_out = nullptr);
ExperimentStatus run_turing_region(const ExperimentConfig& config);
ExperimentStatus run_dispersion(const ExperimentConfig& config);
ExperimentStatus run_simulate(const ExperimentConfig& config);

/// Two-stage critical-length search for one (theta, kinetic value) cell.
CriticalLengthRow critical_length_cell(const ExperimentConfig& config,
                                       double theta, double kinetic_value);

/// Dispatches on the config kind; returns the process exit code contract:
/// 0 success, 1 config error, 2 partial failure.
int run_experiment(const ExperimentConfig& config);

}  // namespace rdcont
