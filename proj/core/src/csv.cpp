#include "rdcont/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rdcont {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_state_csv(const std::filesystem::path& path,
                     const StateVector& state) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "x,u,v\n";
    const int n = state.grid.n_points;
    for (int i = 0; i < n; ++i)
        out << format_double(state.grid.x(i)) << ','
            << format_double(state.u(i)) << ',' << format_double(state.v(i))
            << '\n';
}

void write_branch_csv(const std::filesystem::path& path, const Branch& branch,
                      int n_points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "index,param,max_u,min_u,max_v,leading_eig_real,stable,fold_flag\n";
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& pt = branch.points[i];
        const auto u = pt.state.head(n_points);
        const auto v = pt.state.tail(n_points);
        bool near_fold = false;
        for (const FoldRecord& fold : branch.folds) {
            if (i + 1 < branch.points.size()) {
                const double a = pt.tangent_param_component;
                const double b = branch.points[i + 1].tangent_param_component;
                if (a * b < 0.0 &&
                    std::min(pt.param_value,
                             branch.points[i + 1].param_value) <=
                        fold.param_value &&
                    fold.param_value <=
                        std::max(pt.param_value,
                                 branch.points[i + 1].param_value))
                    near_fold = true;
            }
        }
        out << i << ',' << format_double(pt.param_value) << ','
            << format_double(u.maxCoeff()) << ','
            << format_double(u.minCoeff()) << ','
            << format_double(v.maxCoeff()) << ','
            << format_double(pt.leading_eigenvalue_real) << ','
            << (pt.stable ? 1 : 0) << ',' << (near_fold ? 1 : 0) << '\n';
    }
}

}  // namespace rdcont
