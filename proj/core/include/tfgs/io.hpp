#pragma once

#include "tfgs/flow.hpp"
#include "tfgs/functionals.hpp"
#include "tfgs/radial.hpp"
#include "tfgs/riesz.hpp"

#include <map>
#include <string>
#include <vector>

namespace tfgs::io {

inline constexpr const char* kVersion = "0.1.0";

// Decimal with 17 significant digits.
std::string num(double x);

struct ProfileMeta {
    Params params;
    bool has_params = false;
    std::map<std::string, double> scalars;
};

// CSV `r,u` plus `<path>.json` with params, tail model and grid metadata.
void write_profile(const std::string& path, const RadialFunction& u, const ProfileMeta& meta);
// Reads a profile written by write_profile; without a sidecar the grid is rebuilt from the r column
// and N must be supplied.
RadialFunction read_profile(const std::string& path, ProfileMeta* meta = nullptr, int N_fallback = 0);

void write_field(const std::string& path, const PotentialField& f);
void write_history(const std::string& path, const std::vector<HistoryEntry>& h);

// JSON text of a report; `config` is embedded verbatim when non-empty (it must be a JSON object).
std::string report_json(const GroundStateReport& r, const std::string& config = "");
std::string functionals_json(const Functionals& F);

// Re-emits JSON text with every float at 17 significant digits.
std::string format_json(const std::string& text);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace tfgs::io
