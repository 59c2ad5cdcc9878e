#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cavicool/cooling.hpp"
#include "cavicool/oracle.hpp"
#include "cavicool/params.hpp"

namespace cavicool {

void to_json(nlohmann::json& j, const SystemParams& p);
void from_json(const nlohmann::json& j, SystemParams& p);
void to_json(nlohmann::json& j, const DerivedParams& d);
void to_json(nlohmann::json& j, const RegimeInfo& r);
void to_json(nlohmann::json& j, const CoolingResult& r);
void to_json(nlohmann::json& j, const Table1Cell& c);

namespace oracle {
void to_json(nlohmann::json& j, const Truncation& t);
void to_json(nlohmann::json& j, const Physicality& p);
void to_json(nlohmann::json& j, const FitResult& f);
// Trajectory samples are left to the CSV dumps; only the summary goes here.
void to_json(nlohmann::json& j, const OracleRun& r);
void to_json(nlohmann::json& j, const ConvergenceRecord& r);
}  // namespace oracle

namespace io {

const char* version();

// 17 significant digits in scientific notation; round-trips exactly.
std::string number(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> columns);
  // Throws std::invalid_argument when the width differs from the header.
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
  std::size_t width_;
};

void write_trajectory_csv(std::ostream& os, const oracle::Trajectory& t);

// "key = value" lines; '#' starts a comment. Errors carry "path:line:".
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigFile {
  std::string path;
  std::vector<ConfigEntry> entries;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ConfigFile parse_config(std::istream& is, const std::string& path);
ConfigFile load_config(const std::string& path);

// Comma-separated list of numbers; throws std::invalid_argument.
std::vector<double> parse_list(const std::string& text);
double parse_number(const std::string& text);

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  // Evenly spaced, strictly increasing; throws std::invalid_argument for an
  // empty or reversed grid.
  std::vector<double> values() const;
};

// Parameter echo, derived quantities, regime tags and validity flags for
// every point of a run. No timestamps so identical runs emit identical bytes.
nlohmann::json manifest(const std::string& command, const std::string& preset,
                        const std::vector<SystemParams>& points,
                        const nlohmann::json& options,
                        const std::vector<std::string>& outputs);

}  // namespace io
}  // namespace cavicool
