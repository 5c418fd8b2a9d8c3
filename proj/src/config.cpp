#include "gf/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace gf::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// family:k=v,k=v  or  family(k=v, k=v)  ->  (family, {k: v})
std::pair<std::string, std::map<std::string, std::string>> parse_call(const std::string& spec) {
    std::string s = trim(spec);
    std::string name, args;
    const auto paren = s.find('(');
    const auto colon = s.find(':');
    if (paren != std::string::npos && (colon == std::string::npos || paren < colon)) {
        if (s.back() != ')') throw ConfigError("unbalanced parentheses in '" + spec + "'");
        name = trim(s.substr(0, paren));
        args = s.substr(paren + 1, s.size() - paren - 2);
    } else if (colon != std::string::npos) {
        name = trim(s.substr(0, colon));
        args = s.substr(colon + 1);
    } else {
        name = s;
    }
    std::map<std::string, std::string> kv;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value in '" + item + "'");
        kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
    return {name, kv};
}

double want_number(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing parameter '" + key + "'");
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + it->second + "' for '" + key + "'");
    }
}

bool flag_or(const std::map<std::string, std::string>& kv, const std::string& key, bool dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("expected true|false for '" + key + "'");
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + line + "'");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

kernels::KernelModel parse_kernel(const std::string& spec) {
    auto [name, kv] = parse_call(spec);
    const bool sym = flag_or(kv, "support_symmetrized", true);
    kernels::KernelModel k = [&]() {
        if (name == "constant") return kernels::KernelModel::constant(want_number(kv, "c"), sym);
        if (name == "powerSingular" || name == "power_singular") {
            const double kappa = kv.count("kappa") ? want_number(kv, "kappa") : 1.0;
            return kernels::KernelModel::power_singular(kappa, want_number(kv, "nu"), sym);
        }
        if (name == "scaledPower" || name == "scaled_power") {
            const double ke = kv.count("k_e") ? want_number(kv, "k_e") : want_number(kv, "strength");
            return kernels::KernelModel::scaled_power(ke, want_number(kv, "beta"));
        }
        throw ConfigError("unknown kernel family '" + name + "'");
    }();
    if (kv.count("cutoff")) k = k.truncated(want_number(kv, "cutoff"));
    return k;
}

charfun::CharFn parse_phi(const std::string& spec) {
    std::string s = trim(spec);
    if (s.rfind("mixture", 0) == 0) {
        const auto open = s.find('(');
        if (open == std::string::npos || s.back() != ')') {
            throw ConfigError("mixture needs (w;phi;w;phi;...)");
        }
        std::stringstream ss(s.substr(open + 1, s.size() - open - 2));
        std::string item;
        std::vector<std::string> parts;
        while (std::getline(ss, item, ';')) parts.push_back(trim(item));
        if (parts.size() < 2 || parts.size() % 2 != 0) {
            throw ConfigError("mixture needs weight;phi pairs");
        }
        std::vector<std::pair<double, charfun::CharFn>> members;
        for (std::size_t i = 0; i < parts.size(); i += 2) {
            members.emplace_back(std::stod(parts[i]), parse_phi(parts[i + 1]));
        }
        return charfun::CharFn::mixture(std::move(members));
    }
    auto [name, kv] = parse_call(s);
    if (name == "one") return charfun::CharFn::one();
    if (name == "gaussian") return charfun::CharFn::gaussian(want_number(kv, "t"));
    if (name == "stable") {
        return charfun::CharFn::stable(want_number(kv, "alpha"), want_number(kv, "c"));
    }
    throw ConfigError("unknown characteristic function '" + name + "'");
}

}  // namespace gf::config
