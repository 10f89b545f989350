#pragma once

#include <ostream>
#include <string>

#include "helmdual/config.hpp"

namespace helmdual {

// Runs the configured mode and writes its artifacts plus manifest.csv and
// config.effective into cfg.output. Returns 0 iff every requested check
// passed; on an Error writes error.json and returns 2.
int run_experiment(const RunConfig& cfg, std::ostream& log);

// Machine-readable error record written to `dir`/error.json.
void write_error_record(const std::string& dir, const std::string& kind, const std::string& message);

}  // namespace helmdual
