#ifndef TOOLS_COMMANDS_HPP
#define TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace cli {

// Exit codes: 0 ok, 1 config error, 2 math/singularity error,
// 3 verification failure. Config/math errors are thrown (ConfigError /
// the math error types) and mapped by the caller.
int cmd_derive(const SystemConfig& cfg, const std::string& state_text, std::ostream& out);
int cmd_simulate(const SystemConfig& cfg, std::ostream& out);
int cmd_verify(const SystemConfig& cfg, std::ostream& out);
int cmd_frame(const SystemConfig& cfg, std::ostream& out);

// Shortest round-trippable decimal with 17 significant digits.
std::string format_g17(double v);

}  // namespace cli

#endif
