#include "registry.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace pshlab::registry {

namespace {

struct Params {
    std::map<std::string, double> num;

    double get(const std::string& key, double fallback) const {
        auto it = num.find(key);
        return it == num.end() ? fallback : it->second;
    }
    int get_int(const std::string& key, int fallback) const {
        return static_cast<int>(get(key, fallback));
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

/// "name(k=v, k2=v2)" -> (name, params). Bare "name" has empty params.
std::pair<std::string, Params> parse_ref(const std::string& ref) {
    const auto open = ref.find('(');
    if (open == std::string::npos) return {trim(ref), {}};
    const auto close = ref.rfind(')');
    if (close == std::string::npos || close < open)
        throw InvalidArgument("unbalanced parentheses in reference: " + ref);
    Params p;
    std::string body = ref.substr(open + 1, close - open - 1);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("expected key=value in: " + ref);
        const std::string key = trim(item.substr(0, eq));
        const std::string val = trim(item.substr(eq + 1));
        char* end = nullptr;
        const double x = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw InvalidArgument("non-numeric value for '" + key + "' in: " + ref);
        p.num[key] = x;
    }
    return {trim(ref.substr(0, open)), p};
}

}  // namespace

PshSpecD make_spec(const std::string& ref) {
    const auto [name, p] = parse_ref(ref);
    if (name == "abs-sq") return catalog::abs_sq<double>(p.get_int("n", 2), p.get("offset", 0));
    if (name == "log-abs") return catalog::log_abs<double>(p.get_int("n", 2), p.get_int("coord", 1) - 1);
    if (name == "log-sum") return catalog::log_sum<double>();
    if (name == "cegrell") return catalog::cegrell<double>();
    if (name == "blocki") return catalog::blocki<double>();
    if (name == "barrier-v") return catalog::barrier_v<double>(p.get("m", 6));
    if (name == "shifted-log")
        return catalog::shifted_log<double>(p.get_int("n", 2), p.get_int("coord", 1) - 1,
                                            p.get("s", 0.5));
    if (name == "re-affine")
        return catalog::re_affine<double>(
            p.get_int("n", 2),
            {std::complex<double>(p.get("ax1", 1), p.get("ay1", 0)),
             std::complex<double>(p.get("ax2", 0), p.get("ay2", 0))},
            p.get("c", 0));
    if (name == "log-prod") return catalog::log_prod<double>();
    if (name == "log-norm") return catalog::log_norm<double>(p.get_int("n", 2));
    if (name == "log-norm-envelope")
        return catalog::log_norm_envelope<double>(p.get_int("n", 2), p.get("r0", 1), p.get("R", 2),
                                                  p.get("eps", 0.05));
    if (name == "abs-sq-profile")
        return catalog::abs_sq_profile<double>(p.get_int("n", 2), p.get("a", 0.25), p.get("b", 0),
                                               p.get("eps", 0.02));
    throw InvalidArgument("unknown spec: '" + name + "'");
}

ChiWeightD make_chi(const std::string& ref) {
    const auto [name, p] = parse_ref(ref);
    if (name == "identity") return ChiWeightD::identity();
    if (name == "phi-alpha") return ChiWeightD::phi_alpha(p.get("alpha", 0.25));
    if (name == "exp-family") return ChiWeightD::exp_family(p.get("m", 1));
    if (name == "cutoff") return ChiWeightD::cutoff(-p.get("j", 1), p.get("eps", 0));
    if (name == "constant") {
        const double c = p.get("c", -1);
        return ChiWeightD::table({{-1.0, c}, {0.0, c}});
    }
    throw InvalidArgument("unknown chi family: '" + name + "'");
}

SequenceSchemeD make_scheme(const std::string& ref) {
    const auto [name, p] = parse_ref(ref);
    if (name == "max-cutoff") return SequenceSchemeD::max_cutoff(p.get("smoothing", 0));
    if (name == "log-shift") return SequenceSchemeD::log_shift();
    if (name == "chi-compose")
        return SequenceSchemeD::chi_compose(p.get("m0", 1), p.get("growth", 2));
    if (name == "mollify-scale") return SequenceSchemeD::mollify_scale(p.get("eps0", 0.3));
    throw InvalidArgument("unknown scheme: '" + name + "'");
}

std::vector<CatalogRow> catalog_listing() {
    std::vector<CatalogRow> rows;
    const char* specs[] = {"abs-sq",     "abs-sq-profile", "barrier-v", "blocki",
                           "cegrell",    "log-abs",        "log-norm",  "log-norm-envelope",
                           "log-prod",   "log-sum",        "re-affine", "shifted-log"};
    for (const char* s : specs) rows.push_back({s, "spec", make_spec(s).describe()});
    rows.push_back({"identity", "chi", "chi(t) = t"});
    rows.push_back({"phi-alpha", "chi", "chi(t) = -(-t)^alpha, 0 < alpha < 1"});
    rows.push_back({"exp-family", "chi", "chi_m(t) = -m(1 - e^{t/m}), decreasing to t as m grows"});
    rows.push_back({"cutoff", "chi", "chi(t) = max(t, -j), optional smoothing eps"});
    rows.push_back({"constant", "chi", "chi(t) = c (table-backed, chi' = 0)"});
    rows.push_back({"max-cutoff", "scheme", "u_j = max(u, -j) per summand; smoothing optional"});
    rows.push_back({"log-shift", "scheme", "log|z| atoms -> (1/2) log(|z|^2 + 1/j)"});
    rows.push_back({"chi-compose", "scheme", "u_j = chi_{m_j}(u), m_j = m0 growth^{j-1}"});
    rows.push_back({"mollify-scale", "scheme", "u_j = u * bump_{eps0/j}"});
    std::sort(rows.begin(), rows.end(), [](const CatalogRow& a, const CatalogRow& b) {
        return a.kind != b.kind ? a.kind < b.kind : a.name < b.name;
    });
    return rows;
}

}  // namespace pshlab::registry
