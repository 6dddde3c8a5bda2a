#include "rdcont/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rdcont/csv.hpp"
#include "rdcont/newton.hpp"
#include "rdcont/stability.hpp"

namespace rdcont {

using nlohmann::json;

std::vector<double> SweepBlock::values() const {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        if (log_spacing)
            out.push_back(min * std::pow(max / min, t));
        else
            out.push_back(min + t * (max - min));
    }
    return out;
}

namespace {

ExperimentKind parse_kind(const std::string& s) {
    if (s == "bifurcation") return ExperimentKind::Bifurcation;
    if (s == "fold-scan") return ExperimentKind::FoldScan;
    if (s == "critical-length") return ExperimentKind::CriticalLength;
    if (s == "turing-region") return ExperimentKind::TuringRegion;
    if (s == "dispersion") return ExperimentKind::Dispersion;
    if (s == "simulate") return ExperimentKind::Simulate;
    throw ConfigError("unknown experiment kind: " + s);
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "schnakenberg") return ModelKind::Schnakenberg;
    if (s == "gierer-meinhardt") return ModelKind::GiererMeinhardt;
    throw ConfigError("unknown model kind: " + s);
}

SweepBlock parse_sweep(const json& j) {
    SweepBlock sweep;
    sweep.param = j.at("param").get<std::string>();
    sweep.min = j.at("min").get<double>();
    sweep.max = j.at("max").get<double>();
    sweep.count = j.at("count").get<int>();
    if (j.contains("spacing")) {
        const std::string spacing = j["spacing"].get<std::string>();
        if (spacing == "log")
            sweep.log_spacing = true;
        else if (spacing != "linear")
            throw ConfigError("unknown sweep spacing: " + spacing);
    }
    if (sweep.count < 1) throw ConfigError("sweep count must be >= 1");
    if (sweep.min > sweep.max) throw ConfigError("sweep bounds out of order");
    static const std::vector<std::string> known = {"gamma", "beta0", "a0",
                                                   "n", "theta"};
    if (std::find(known.begin(), known.end(), sweep.param) == known.end())
        throw ConfigError("unknown sweep parameter: " + sweep.param);
    return sweep;
}

/// Runs fn(i) for i in [0, count) over a pool; results land by index so
/// output order is deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(int count, int workers, const Fn& fn) {
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count;
                 i = next.fetch_add(1))
                fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

void write_summary(const std::filesystem::path& dir, const json& summary) {
    std::ofstream out(dir / "summary.json");
    if (!out)
        throw std::runtime_error("cannot write " +
                                 (dir / "summary.json").string());
    out << summary.dump(2) << '\n';
}

json fold_to_json(const FoldRecord& fold) {
    json j;
    j["param"] = fold.param_value;
    j["method"] = fold.detection_method == FoldDetection::TangentSignChange
                      ? "tangent-sign-change"
                      : "corrector-failure-bisection";
    return j;
}

std::string termination_name(BranchTermination t) {
    switch (t) {
        case BranchTermination::ParamLimit: return "param-limit";
        case BranchTermination::MaxPoints: return "max-points";
        case BranchTermination::FirstFold: return "first-fold";
        case BranchTermination::ClosedLoop: return "closed-loop";
        case BranchTermination::Unresolved: return "unresolved";
    }
    return "unknown";
}

}  // namespace

int worker_count(const ExperimentConfig& config) {
    if (const char* env = std::getenv("TC_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1, config.workers);
}

ModelSpec ExperimentConfig::make_model() const {
    return ModelSpec(model_kind, d, gamma, params, het_n);
}

ModelSpec ExperimentConfig::make_model(double gamma_value,
                                       double kinetic_value) const {
    KineticParams p = params;
    if (model_kind == ModelKind::Schnakenberg)
        p.beta0 = kinetic_value;
    else
        p.a0 = kinetic_value;
    return ModelSpec(model_kind, d, gamma_value, p, het_n);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    try {
        ExperimentConfig c;
        c.kind = parse_kind(j.at("experiment").get<std::string>());
        const json& model = j.at("model");
        c.model_kind = parse_model_kind(model.at("kind").get<std::string>());
        c.gamma = model.value("gamma", 1.0);
        if (c.model_kind == ModelKind::Schnakenberg) {
            c.d = model.value("d", 1.0 / 40.0);
            c.params.beta0 = model.value("beta0", 0.8);
        } else {
            c.d = model.value("d", 20.0);
            c.params.a0 = model.value("a0", 0.1);
            c.params.b = model.value("b", 1.0);
        }
        c.het_n = model.value("n", 1);
        c.theta = model.value("theta", 0.0);

        if (j.contains("sweeps"))
            for (const json& s : j["sweeps"]) c.sweeps.push_back(parse_sweep(s));
        if (j.contains("theta_targets"))
            c.theta_targets = j["theta_targets"].get<std::vector<double>>();

        if (j.contains("numerics")) {
            const json& num = j["numerics"];
            c.n_points = num.value("n_points", 201);
            if (c.n_points < 3) throw ConfigError("n_points must be >= 3");
            if (num.contains("newton")) {
                const json& nw = num["newton"];
                c.newton.abs_tol = nw.value("abs_tol", c.newton.abs_tol);
                c.newton.max_iters = nw.value("max_iters", c.newton.max_iters);
                c.newton.damping = nw.value("damping", c.newton.damping);
            }
            if (num.contains("continuation")) {
                const json& ct = num["continuation"];
                c.continuation.initial_step =
                    ct.value("initial_step", c.continuation.initial_step);
                c.continuation.min_step =
                    ct.value("min_step", c.continuation.min_step);
                c.continuation.max_step =
                    ct.value("max_step", c.continuation.max_step);
                c.continuation.param_min =
                    ct.value("param_min", c.continuation.param_min);
                c.continuation.param_max =
                    ct.value("param_max", c.continuation.param_max);
                c.continuation.max_points =
                    ct.value("max_points", c.continuation.max_points);
                c.continuation.jump_threshold =
                    ct.value("jump_threshold", c.continuation.jump_threshold);
                if (ct.contains("mode")) {
                    const std::string mode = ct["mode"].get<std::string>();
                    if (mode == "natural")
                        c.continuation.mode = ContinuationMode::Natural;
                    else if (mode == "arclength")
                        c.continuation.mode = ContinuationMode::Arclength;
                    else
                        throw ConfigError("unknown continuation mode: " + mode);
                }
                if (c.continuation.min_step <= 0.0 ||
                    c.continuation.min_step > c.continuation.initial_step ||
                    c.continuation.initial_step > c.continuation.max_step)
                    throw ConfigError("continuation step sizes out of order");
            }
            if (num.contains("integration")) {
                const json& in = num["integration"];
                c.integration.dt = in.value("dt", c.integration.dt);
                c.integration.t_max = in.value("t_max", c.integration.t_max);
                c.integration.steady_tol =
                    in.value("steady_tol", c.integration.steady_tol);
                c.integration.perturbation_amplitude = in.value(
                    "perturbation", c.integration.perturbation_amplitude);
            }
            c.gamma_search_min =
                num.value("gamma_search_min", c.gamma_search_min);
            c.gamma_search_max =
                num.value("gamma_search_max", c.gamma_search_max);
            c.max_mode = num.value("max_mode", c.max_mode);
        }
        c.continuation.newton = c.newton;

        c.bidirectional = j.value("bidirectional", false);
        c.trace_patterned = j.value("trace_patterned", true);
        c.output_dir = j.value("output_dir", std::string("out"));
        c.workers = j.value("workers", 1);
        c.seed = j.value("seed", 1u);
        c.integration.seed = c.seed;
        c.make_model();  // validates parameter ranges
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    } catch (const ModelError& e) {
        throw ConfigError(std::string("invalid model parameters: ") +
                          e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json_file(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string apply_override(const std::string& json_text,
                           const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json doc = json::parse(json_text);
    json* node = &doc;
    std::istringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("empty override key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
        node = &(*node)[parts[i]];
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;  // bare strings stay strings
    }
    (*node)[parts.back()] = parsed;
    return doc.dump();
}

ExperimentStatus run_bifurcation(const ExperimentConfig& config) {
    const ModelSpec model = config.make_model();
    const Grid1D grid(config.n_points);
    std::filesystem::create_directories(config.output_dir);

    ContinuationSettings settings = config.continuation;
    settings.detect_closed_loop = true;

    ExperimentStatus status;
    json summary;
    summary["experiment"] = "bifurcation";
    summary["branches"] = json::array();

    auto record_branch = [&](const Branch& branch, const std::string& name) {
        write_branch_csv(config.output_dir / (name + ".csv"), branch,
                         config.n_points);
        json entry;
        entry["name"] = name;
        entry["points"] = branch.points.size();
        entry["termination"] = termination_name(branch.termination);
        entry["folds"] = json::array();
        for (const FoldRecord& fold : branch.folds)
            entry["folds"].push_back(fold_to_json(fold));
        if (branch.termination == BranchTermination::ClosedLoop)
            entry["closure_gap"] = branch.closure_gap;
        if (!branch.points.empty()) {
            entry["param_start"] = branch.points.front().param_value;
            entry["param_end"] = branch.points.back().param_value;
        }
        summary["branches"].push_back(entry);
        if (branch.termination == BranchTermination::Unresolved) {
            status.ok = false;
            ++status.cells_unresolved;
        }
    };

    Branch forward = trace_base_branch(model, grid, settings);
    record_branch(forward, "base_forward");
    if (!forward.points.empty())
        write_state_csv(config.output_dir / "base_forward_last.csv",
                        StateVector(grid, forward.points.back().state));

    if (config.bidirectional) {
        ContinuationSettings back = settings;
        back.direction = -1;
        back.param_min = -settings.param_max;
        Branch backward = trace_base_branch(model, grid, back);
        record_branch(backward, "base_backward");
    }

    if (config.trace_patterned) {
        // Patterned branches are seeded by time integration at theta = 0.
        const StateVector uniform =
            StateVector::constant(grid, model.uniform_steady_state());
        const StateVector noisy = perturb_state(
            uniform, config.integration.perturbation_amplitude, config.seed);
        try {
            const IntegrationOutcome evolved =
                evolve_to_steady(model, noisy, 0.0, config.integration);
            if (evolved.converged) {
                const RdProblem problem(model, grid, ActiveParam::Theta, 0.0);
                const BranchPoint seed = make_branch_point(
                    problem, evolved.state, 0.0, settings);
                const double amp = seed.state.head(grid.n_points).maxCoeff() -
                                   seed.state.head(grid.n_points).minCoeff();
                if (amp > 1e-6) {
                    Branch patterned =
                        continue_branch(problem, seed, settings);
                    patterned.provenance = "time-integration seed";
                    record_branch(patterned, "patterned");
                    write_state_csv(config.output_dir / "patterned_seed.csv",
                                    StateVector(grid, seed.state));
                }
            }
        } catch (const std::runtime_error& e) {
            summary["patterned_error"] = e.what();
        }
    }

    write_summary(config.output_dir, summary);
    return status;
}

ExperimentStatus run_fold_scan(const ExperimentConfig& config,
                               ScanResult* result_out) {
    if (config.sweeps.size() != 2)
        throw ConfigError("fold-scan needs exactly two sweep blocks");
    const SweepBlock& s1 = config.sweeps[0];
    const SweepBlock& s2 = config.sweeps[1];
    std::filesystem::create_directories(config.output_dir);

    ScanResult result;
    result.axis1 = s1.values();
    result.axis2 = s2.values();
    const int n1 = static_cast<int>(result.axis1.size());
    const int n2 = static_cast<int>(result.axis2.size());
    result.cells.resize(n1 * n2);

    auto model_for_cell = [&](double v1, double v2) {
        KineticParams p = config.params;
        double gamma = config.gamma;
        int het_n = config.het_n;
        auto apply = [&](const std::string& name, double v) {
            if (name == "gamma") gamma = v;
            else if (name == "beta0") p.beta0 = v;
            else if (name == "a0") p.a0 = v;
            else if (name == "n") het_n = static_cast<int>(std::lround(v));
            else throw ConfigError("fold-scan cannot sweep " + name);
        };
        apply(s1.param, v1);
        apply(s2.param, v2);
        return ModelSpec(config.model_kind, config.d, gamma, p, het_n);
    };

    const Grid1D grid(config.n_points);
    ContinuationSettings settings = config.continuation;
    settings.mode = ContinuationMode::Arclength;
    settings.stop_at_first_fold = true;
    settings.compute_stability = false;

    parallel_for(n1 * n2, worker_count(config), [&](int idx) {
        const int i = idx / n2;
        const int k = idx % n2;
        ScanCell& cell = result.cells[idx];
        cell.param1 = result.axis1[i];
        cell.param2 = result.axis2[k];
        try {
            const ModelSpec model = model_for_cell(cell.param1, cell.param2);
            const ThetaPlusResult tp = theta_plus(model, grid, settings);
            switch (tp.status) {
                case ThetaPlusStatus::Fold:
                    cell.status = CellStatus::Fold;
                    cell.theta_plus = *tp.value;
                    break;
                case ThetaPlusStatus::NoFoldInRange:
                    cell.status = CellStatus::NoFold;
                    break;
                case ThetaPlusStatus::NumericallyUnresolved:
                    cell.status = CellStatus::Unresolved;
                    break;
            }
        } catch (const std::exception&) {
            cell.status = CellStatus::Unresolved;
        }
    });

    // scan.csv: one row per cell with its theta+ classification.
    {
        std::ofstream out(config.output_dir / "scan.csv");
        out << s1.param << ',' << s2.param << ",status,theta_plus\n";
        for (const ScanCell& cell : result.cells) {
            const char* status = cell.status == CellStatus::Fold ? "fold"
                                 : cell.status == CellStatus::NoFold
                                     ? "no-fold"
                                     : "unresolved";
            out << format_double(cell.param1) << ','
                << format_double(cell.param2) << ',' << status << ','
                << (cell.status == CellStatus::Fold
                        ? format_double(cell.theta_plus)
                        : "")
                << '\n';
        }
    }

    // overlays.csv: Lambda_m = 0 loci in gamma for the swept kinetic values.
    {
        std::ofstream out(config.output_dir / "overlays.csv");
        out << "m,sweep_value,gamma_low,gamma_high\n";
        const SweepBlock& kinetic =
            s1.param == "gamma" ? s2 : s1;
        for (int m = 1; m <= 3; ++m) {
            for (const double v : kinetic.values()) {
                KineticParams p = config.params;
                int het_n = config.het_n;
                if (kinetic.param == "beta0") p.beta0 = v;
                else if (kinetic.param == "a0") p.a0 = v;
                else if (kinetic.param == "n")
                    het_n = static_cast<int>(std::lround(v));
                const ModelSpec model(config.model_kind, config.d,
                                      config.gamma, p, het_n);
                const auto roots = gamma_instability_roots(model, m);
                if (roots)
                    out << m << ',' << format_double(v) << ','
                        << format_double(roots->first) << ','
                        << format_double(roots->second) << '\n';
            }
        }
    }

    ExperimentStatus status;
    json summary;
    summary["experiment"] = "fold-scan";
    summary["cells"] = result.cells.size();
    int unresolved = 0;
    for (const ScanCell& cell : result.cells)
        if (cell.status == CellStatus::Unresolved) ++unresolved;
    summary["unresolved"] = unresolved;
    write_summary(config.output_dir, summary);
    status.cells_unresolved = unresolved;
    status.ok = unresolved == 0;
    if (result_out) *result_out = std::move(result);
    return status;
}

CriticalLengthRow critical_length_cell(const ExperimentConfig& config,
                                       double theta, double kinetic_value) {
    CriticalLengthRow row;
    row.theta = theta;
    row.kinetic_param = kinetic_value;

    const ModelSpec probe = config.make_model(config.gamma, kinetic_value);
    const auto gamma_c0 = critical_gamma(probe, config.max_mode);
    if (!gamma_c0) {
        row.status = CriticalLengthStatus::NotFound;
        return row;
    }

    const Grid1D grid(config.n_points);

    // Base state at one gamma: continue in theta from the uniform state to
    // the target at that fixed gamma; report the leading eigenvalue when the
    // target is reached, nothing when the branch folds first.
    auto leading_at = [&](double gamma_value) -> std::optional<double> {
        const ModelSpec model = config.make_model(gamma_value, kinetic_value);
        if (std::abs(theta) < 1e-12) {
            const Eigen::VectorXd uniform =
                StateVector::constant(grid, model.uniform_steady_state())
                    .values;
            const RdProblem problem(model, grid, ActiveParam::Theta, 0.0);
            return problem.leading_real(uniform, 0.0);
        }
        ContinuationSettings stage1 = config.continuation;
        stage1.mode = ContinuationMode::Arclength;
        stage1.stop_at_first_fold = true;
        stage1.compute_stability = false;
        stage1.param_max = std::max(0.0, theta);
        stage1.param_min = std::min(0.0, theta);
        stage1.direction = theta >= 0.0 ? +1 : -1;
        const Branch branch = trace_base_branch(model, grid, stage1);
        if (!branch.folds.empty() ||
            branch.termination != BranchTermination::ParamLimit ||
            branch.points.empty() ||
            std::abs(branch.points.back().param_value - theta) > 1e-9)
            return std::nullopt;
        const RdProblem problem(model, grid, ActiveParam::Theta, 0.0);
        return problem.leading_real(branch.points.back().state, theta);
    };

    // Stage 1: find a starting gamma at or below gamma_c0 where the base
    // state reaches the target theta. Exactly at gamma_c0 the linearization
    // is singular against the heterogeneity and the theta-branch folds at
    // once, so back off multiplicatively until the continuation survives.
    double gamma_start = *gamma_c0;
    std::optional<double> start_lead = leading_at(gamma_start);
    for (int backoff = 0;
         !start_lead && backoff < 60 &&
         gamma_start * 0.95 >= config.gamma_search_min;
         ++backoff) {
        gamma_start *= 0.95;
        start_lead = leading_at(gamma_start);
    }
    if (!start_lead) {
        row.status = CriticalLengthStatus::BaseStateLost;
        return row;
    }

    // Stage 2: march gamma away from the start (up when stable, down when
    // unstable) until the stability verdict changes, then bisect. A fold of
    // the theta-branch ends the base state through a singular linearization,
    // so losing the state counts as the not-stable side of the crossing.
    const bool start_stable = *start_lead < 0.0;
    auto stable_at = [&](double g) {
        const std::optional<double> lead = leading_at(g);
        return lead.has_value() && *lead < 0.0;
    };
    const double factor = start_stable ? 1.05 : 1.0 / 1.05;
    double lo = gamma_start;  // start-side verdict
    double hi = gamma_start;
    bool bracketed = false;
    for (double g = gamma_start * factor;
         g >= config.gamma_search_min && g <= config.gamma_search_max;
         g *= factor) {
        if (stable_at(g) != start_stable) {
            hi = g;
            bracketed = true;
            break;
        }
        lo = g;
    }
    if (!bracketed) {
        row.status = CriticalLengthStatus::NotFound;
        return row;
    }
    while (std::abs(hi - lo) > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (stable_at(mid) == start_stable ? lo : hi) = mid;
    }
    row.status = CriticalLengthStatus::Found;
    row.gamma_critical = 0.5 * (lo + hi);
    row.length = std::sqrt(row.gamma_critical);
    return row;
}

ExperimentStatus run_critical_length(
    const ExperimentConfig& config,
    std::vector<CriticalLengthRow>* rows_out) {
    if (config.sweeps.size() != 1)
        throw ConfigError("critical-length needs one kinetic sweep block");
    if (config.theta_targets.empty())
        throw ConfigError("critical-length needs theta_targets");
    const std::vector<double> kinetic = config.sweeps[0].values();
    std::filesystem::create_directories(config.output_dir);

    std::vector<CriticalLengthRow> rows(config.theta_targets.size() *
                                        kinetic.size());
    const int nk = static_cast<int>(kinetic.size());
    parallel_for(static_cast<int>(rows.size()), worker_count(config),
                 [&](int idx) {
                     const double theta = config.theta_targets[idx / nk];
                     const double kv = kinetic[idx % nk];
                     rows[idx] = critical_length_cell(config, theta, kv);
                 });

    std::ofstream out(config.output_dir / "critical_length.csv");
    out << "theta," << config.sweeps[0].param
        << ",status,gamma_critical,L_critical\n";
    int failures = 0;
    for (const CriticalLengthRow& row : rows) {
        const char* status =
            row.status == CriticalLengthStatus::Found       ? "found"
            : row.status == CriticalLengthStatus::BaseStateLost
                ? "base-state-lost"
                : "not-found";
        out << format_double(row.theta) << ','
            << format_double(row.kinetic_param) << ',' << status << ',';
        if (row.status == CriticalLengthStatus::Found)
            out << format_double(row.gamma_critical) << ','
                << format_double(row.length);
        else
            out << ',';
        out << '\n';
        if (row.status != CriticalLengthStatus::Found) ++failures;
    }

    json summary;
    summary["experiment"] = "critical-length";
    summary["rows"] = rows.size();
    summary["failures"] = failures;
    write_summary(config.output_dir, summary);

    ExperimentStatus status;
    status.cells_unresolved = failures;
    status.ok = true;  // not-found cells are expected outcomes, not errors
    if (rows_out) *rows_out = std::move(rows);
    return status;
}

ExperimentStatus run_turing_region(const ExperimentConfig& config) {
    const ModelSpec model = config.make_model();
    const Grid1D grid(config.n_points);
    std::filesystem::create_directories(config.output_dir);

    std::ofstream out(config.output_dir / "turing_region.csv");
    out << "x,production_u,production_v,turing_local\n";
    std::vector<int> flags(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        const Vec2 base =
            model.kind() == ModelKind::Schnakenberg
                ? Vec2(model.params().beta0, 1.0 - model.params().beta0)
                : Vec2(model.params().a0, 0.0);
        const Vec2 production =
            base + config.theta * model.heterogeneity_term(x);
        flags[i] = turing_region_local(model, x, config.theta) ? 1 : 0;
        out << format_double(x) << ',' << format_double(production[0]) << ','
            << format_double(production[1]) << ',' << flags[i] << '\n';
    }

    // Gap diagnostic: widths of the unflagged runs between flagged intervals.
    json gaps = json::array();
    int run_start = -1;
    bool seen_flagged = false;
    for (int i = 0; i < grid.n_points; ++i) {
        if (flags[i]) {
            if (run_start >= 0 && seen_flagged)
                gaps.push_back((i - run_start) * grid.h);
            run_start = -1;
            seen_flagged = true;
        } else if (run_start < 0) {
            run_start = i;
        }
    }
    json summary;
    summary["experiment"] = "turing-region";
    summary["interior_gap_widths"] = gaps;
    write_summary(config.output_dir, summary);
    return {};
}

ExperimentStatus run_dispersion(const ExperimentConfig& config) {
    const ModelSpec model = config.make_model();
    std::filesystem::create_directories(config.output_dir);
    std::vector<double> gammas = {config.gamma};
    for (const SweepBlock& sweep : config.sweeps)
        if (sweep.param == "gamma") gammas = sweep.values();

    std::ofstream out(config.output_dir / "dispersion.csv");
    out << "m,gamma,lambda_max,root_low,root_high\n";
    for (const double g : gammas) {
        const ModelSpec m_model = model.with_gamma(g);
        for (int m = 0; m <= config.max_mode; ++m) {
            const DispersionReport rep = dispersion(m_model, m);
            out << m << ',' << format_double(g) << ','
                << format_double(rep.lambda_max) << ',';
            if (m >= 1) {
                const auto roots = gamma_instability_roots(m_model, m);
                if (roots)
                    out << format_double(roots->first) << ','
                        << format_double(roots->second);
                else
                    out << ',';
            } else {
                out << ',';
            }
            out << '\n';
        }
    }
    json summary;
    summary["experiment"] = "dispersion";
    const auto gamma_c = critical_gamma(model, config.max_mode);
    summary["critical_gamma"] =
        gamma_c ? json(*gamma_c) : json(nullptr);
    write_summary(config.output_dir, summary);
    return {};
}

ExperimentStatus run_simulate(const ExperimentConfig& config) {
    const ModelSpec model = config.make_model();
    const Grid1D grid(config.n_points);
    std::filesystem::create_directories(config.output_dir);

    const StateVector uniform =
        StateVector::constant(grid, model.uniform_steady_state());
    const StateVector noisy = perturb_state(
        uniform, config.integration.perturbation_amplitude, config.seed);
    const IntegrationOutcome outcome =
        evolve_to_steady(model, noisy, config.theta, config.integration);
    write_state_csv(config.output_dir / "final_state.csv",
                    StateVector(grid, outcome.state));

    json summary;
    summary["experiment"] = "simulate";
    summary["converged"] = outcome.converged;
    summary["t_final"] = outcome.t_final;
    summary["derivative_norm"] = outcome.derivative_norm;

    if (outcome.converged) {
        const NewtonOutcome polished =
            newton_solve(model, StateVector(grid, outcome.state),
                         config.theta, config.newton);
        if (polished.converged) {
            write_state_csv(config.output_dir / "polished_state.csv",
                            StateVector(grid, polished.state));
            const StabilityVerdict verdict = stability_verdict(
                assemble_jacobian(model, StateVector(grid, polished.state),
                                  config.theta));
            summary["polished_residual"] = polished.final_residual_norm;
            summary["stable"] = verdict.stable;
            summary["leading_eigenvalue_real"] =
                verdict.leading_eigenvalues.front().real();
        }
    }
    write_summary(config.output_dir, summary);
    ExperimentStatus status;
    status.ok = outcome.converged;
    if (!status.ok) status.cells_unresolved = 1;
    return status;
}

int run_experiment(const ExperimentConfig& config) {
    ExperimentStatus status;
    switch (config.kind) {
        case ExperimentKind::Bifurcation:
            status = run_bifurcation(config);
            break;
        case ExperimentKind::FoldScan:
            status = run_fold_scan(config);
            break;
        case ExperimentKind::CriticalLength:
            status = run_critical_length(config);
            break;
        case ExperimentKind::TuringRegion:
            status = run_turing_region(config);
            break;
        case ExperimentKind::Dispersion:
            status = run_dispersion(config);
            break;
        case ExperimentKind::Simulate:
            status = run_simulate(config);
            break;
    }
    return status.ok ? 0 : 2;
}

}  // namespace rdcont
