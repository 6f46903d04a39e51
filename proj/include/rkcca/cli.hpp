#pragma once

#include "rkcca/loss.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rkcca {

/// Runs the command line in-process and returns the exit code
/// (0 success, 1 user error, 2 I/O error, 3 numeric failure).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "quadratic", "huber" (= "huber:median:1"), "huber:median:1.5",
/// "huber:1.345", "hampel:median:1:2:3", "tukey:4.685", ...
LossConfig parse_loss_spec(const std::string& text);
std::string loss_spec_string(const LossConfig& config);

}  // namespace rkcca
