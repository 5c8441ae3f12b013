#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iwas {

// Full command-line surface (stats / train / augment / iwas-run / eval /
// multiseed). `args` excludes the program name. Returns the process exit
// code; diagnostics go to `err`, results to `out`. A config file can seed
// any flag via --config or the IWAS_CONFIG environment variable; explicit
// flags win over file values.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace iwas
