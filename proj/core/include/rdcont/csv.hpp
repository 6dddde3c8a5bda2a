#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rdcont/continuation.hpp"
#include "rdcont/discretization.hpp"

namespace rdcont {

/// Writes x,u,v rows, one per grid node.
void write_state_csv(const std::filesystem::path& path,
                     const StateVector& state);

/// Branch file: index,param,max_u,min_u,max_v,leading_eig_real,stable,fold_flag.
void write_branch_csv(const std::filesystem::path& path, const Branch& branch,
                      int n_points);

std::string format_double(double v);

}  // namespace rdcont
