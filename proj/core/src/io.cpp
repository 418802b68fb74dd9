#include "tfgs/io.hpp"

#include "tfgs/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

namespace tfgs::io {

using nlohmann::ordered_json;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

// JSON has no inf/nan: non-finite numbers become null.
ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json params_json(const Params& P) {
    return ordered_json{{"N", P.N}, {"alpha", P.alpha}, {"p", P.p}, {"q", P.q}};
}

std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    return f;
}

double parse_double(const std::string& s, const std::string& path, int line) {
    try {
        size_t pos = 0;
        double x = std::stod(s, &pos);
        if (pos != s.size() && s.find_first_not_of(" \t\r", pos) != std::string::npos) throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
}


// nlohmann prints the shortest round-trip form; every float here gets 17 digits.
std::string dump17(const ordered_json& j, int indent = 2) {
    std::ostringstream os;
    std::function<void(const ordered_json&, int)> rec = [&](const ordered_json& v, int depth) {
        std::string pad(std::size_t(indent * (depth + 1)), ' '), close(std::size_t(indent * depth), ' ');
        if (v.is_object()) {
            if (v.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << ordered_json(it.key()).dump() << ": ";
                rec(it.value(), depth + 1);
            }
            os << "\n" << close << "}";
        } else if (v.is_array()) {
            if (v.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                rec(v[i], depth + 1);
            }
            os << "\n" << close << "]";
        } else if (v.is_number_float()) {
            double x = v.get<double>();
            os << (std::isfinite(x) ? num(x) : "null");
        } else {
            os << v.dump();
        }
    };
    rec(j, 0);
    os << "\n";
    return os.str();
}

}  // namespace

std::string format_json(const std::string& text) { return dump17(ordered_json::parse(text)); }

void write_text(const std::string& path, const std::string& text) {
    auto f = open_out(path);
    f << text;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_profile(const std::string& path, const RadialFunction& u, const ProfileMeta& meta) {
    {
        auto f = open_out(path);
        f << "r,u\n";
        for (int i = 0; i <= u.grid().M(); ++i) f << num(u.grid().node(i)) << ',' << num(u[i]) << '\n';
    }
    ordered_json j;
    j["version"] = kVersion;
    j["N"] = u.N();
    if (meta.has_params) j["params"] = params_json(meta.params);
    j["grid"] = {{"M", u.grid().M()},
                 {"L", u.grid().L()},
                 {"order", u.grid().order()},
                 {"clustering", to_string(u.grid().clustering())}};
    j["edge"] = u.edge() == EdgeRule::jump ? "jump" : "continuous";
    if (u.tail().algebraic())
        j["tail"] = {{"exponent", u.tail().exponent}, {"coefficient", u.tail().coefficient}};
    else
        j["tail"] = nullptr;
    ordered_json sc = ordered_json::object();
    for (const auto& [k, v] : meta.scalars) sc[k] = jnum(v);
    j["scalars"] = sc;
    write_text(path + ".json", dump17(j));
}

RadialFunction read_profile(const std::string& path, ProfileMeta* meta, int N_fallback) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read profile " + path);
    std::string line;
    std::vector<double> r, v;
    int ln = 0;
    while (std::getline(f, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path + ":" + std::to_string(ln) + ": expected 'r,u'");
        std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        if (ln == 1 && a == "r") continue;
        r.push_back(parse_double(a, path, ln));
        v.push_back(parse_double(b, path, ln));
    }
    if (r.size() < 3) throw ParseError(path + ": profile needs at least 3 rows");
    if (r[0] != 0.0) throw ParseError(path + ": first radius must be 0");
    for (size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw ParseError(path + ": radii must be strictly increasing");
    for (double x : v)
        if (!(x >= 0) || !std::isfinite(x)) throw ParseError(path + ": profile values must be finite and nonnegative");

    int N = N_fallback, order = 4;
    Clustering cl = Clustering::uniform;
    TailModel tail;
    EdgeRule edge = EdgeRule::jump;
    ProfileMeta m;
    std::string side = path + ".json";
    if (std::filesystem::exists(side)) {
        ordered_json j;
        try {
            j = ordered_json::parse(read_text(side));
            N = j.at("N").get<int>();
            if (j.contains("grid")) {
                order = j["grid"].value("order", 4);
                cl = clustering_from_string(j["grid"].value("clustering", std::string("uniform")));
            }
            if (j.value("edge", std::string("jump")) == "continuous") edge = EdgeRule::continuous;
            if (j.contains("tail") && !j["tail"].is_null())
                tail = TailModel::power(j["tail"].at("exponent").get<double>(), j["tail"].at("coefficient").get<double>());
            if (j.contains("params")) {
                const auto& p = j["params"];
                m.params = Params{p.at("N").get<int>(), p.at("alpha").get<double>(), p.at("p").get<double>(),
                                  p.at("q").get<double>()};
                m.has_params = true;
            }
            if (j.contains("scalars"))
                for (const auto& [k, x] : j["scalars"].items())
                    if (x.is_number()) m.scalars[k] = x.get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(side + ": " + e.what());
        }
    }
    if (N < 1) throw ParseError(path + ": dimension unknown (no sidecar and no N given)");
    if (meta) *meta = m;
    auto g = std::make_shared<const RadialGrid>(std::move(r), order, cl);
    return RadialFunction(g, std::move(v), N, tail, edge);
}

void write_field(const std::string& path, const PotentialField& fld) {
    auto f = open_out(path);
    f << "r,potential\n";
    for (size_t i = 0; i < fld.values.size(); ++i) f << num(fld.grid->node(int(i))) << ',' << num(fld.values[i]) << '\n';
    for (size_t i = 0; i < fld.tail_r.size(); ++i) f << num(fld.tail_r[i]) << ',' << num(fld.tail_values[i]) << '\n';
}

void write_history(const std::string& path, const std::vector<HistoryEntry>& h) {
    auto f = open_out(path);
    f << "step,time,dt,lambda,residual,drift,rayleigh,stage\n";
    for (const auto& e : h)
        f << e.step << ',' << num(e.time) << ',' << num(e.dt) << ',' << num(e.lambda) << ',' << num(e.residual) << ','
          << num(e.drift) << ',' << num(e.rayleigh) << ',' << e.stage << '\n';
}

namespace {

ordered_json functionals_obj(const Functionals& F) {
    ordered_json j{{"norm2_sq", jnum(F.norm2_sq)},     {"normq_q", jnum(F.normq_q)},
                   {"normp_p", jnum(F.normp_p)},       {"d_alpha", jnum(F.d_alpha)},
                   {"energy", jnum(F.energy_E)},       {"pohozaev", jnum(F.pohozaev_P)},
                   {"nehari", jnum(F.nehari_res)},     {"nehari_rel", jnum(F.nehari_rel())},
                   {"pohozaev_rel", jnum(F.pohozaev_rel())}};
    j["rayleigh"] = F.rayleigh_defined ? jnum(F.rayleigh_R) : ordered_json(nullptr);
    if (F.eps_weight > 0) {
        j["eps_weight"] = jnum(F.eps_weight);
        j["grad_sq"] = jnum(F.grad_sq);
        j["j_eps"] = jnum(F.j_eps);
        j["pohozaev_eps"] = jnum(F.pohozaev_Peps);
        j["pohozaev_eps_rel"] = jnum(F.pohozaev_eps_rel());
    }
    return j;
}

}  // namespace

std::string functionals_json(const Functionals& F) { return dump17(functionals_obj(F)); }

std::string report_json(const GroundStateReport& r, const std::string& config) {
    ordered_json j;
    j["version"] = kVersion;
    j["params"] = params_json(r.params);
    j["converged"] = r.converged;
    j["classification"] = to_string(r.classification);
    j["functionals"] = functionals_obj(r.functionals);
    j["sigma_star_est"] = jnum(r.sigma_star_est);
    j["sigma"] = {{"from_q", jnum(r.sigma.sigma_from_q)},
                  {"from_C", jnum(r.sigma.sigma_from_C)},
                  {"gap", jnum(r.sigma.gap())},
                  {"norm_ratio", jnum(r.sigma.ratio_check)}};
    j["support_radius"] = r.support_radius ? jnum(*r.support_radius) : ordered_json("inf");
    j["jump_lambda"] = r.jump_lambda ? jnum(*r.jump_lambda) : ordered_json(nullptr);
    j["jump_low_confidence"] = r.jump_low_confidence;
    j["center_value"] = jnum(r.center_value);
    if (r.decay_fitted)
        j["decay"] = {{"exponent", jnum(r.decay_exponent)},
                      {"coefficient", jnum(r.decay_coefficient)},
                      {"coefficient_predicted", jnum(r.decay_predicted)}};
    else
        j["decay"] = nullptr;
    j["residual_linf"] = jnum(r.residual_linf);
    j["residual_l2"] = jnum(r.residual_l2);
    j["lambda_inf"] = jnum(r.lambda_inf);
    j["steps"] = r.steps;
    j["pseudo_time"] = jnum(r.pseudo_time);
    j["clip_events"] = r.clip_events;
    j["late_clip_events"] = r.late_clip_events;
    j["init"] = r.init;
    if (!config.empty()) {
        try {
            j["config"] = ordered_json::parse(config);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("report_json: config is not JSON: ") + e.what());
        }
    }
    return dump17(j);
}

}  // namespace tfgs::io
