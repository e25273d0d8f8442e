#include "rcfhe/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

namespace rcfhe {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& v, T max)
{
    unsigned long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end || out > static_cast<unsigned long long>(max))
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    return static_cast<T>(out);
}

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(out))
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    return out;
}

}  // namespace

Transport parse_transport(const std::string& s)
{
    if (s == "inprocess" || s == "in-process")
        return Transport::InProcess;
    if (s == "socket")
        return Transport::Socket;
    throw ConfigError("unknown transport '" + s + "'");
}

LoopMode parse_mode(const std::string& s)
{
    if (s == "encrypted")
        return LoopMode::Encrypted;
    if (s == "fixed")
        return LoopMode::Fixed;
    if (s == "float")
        return LoopMode::Float;
    throw ConfigError("unknown mode '" + s + "'");
}

bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1" || s == "on" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "off" || s == "no")
        return false;
    throw ConfigError("expected a boolean, got '" + s + "'");
}

LoopConfig parse_config(std::istream& is, const LoopConfig& base)
{
    LoopConfig cfg = base;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "seed") {
            cfg.seed = parse_unsigned<std::uint64_t>(key, value,
                                                     std::numeric_limits<std::uint64_t>::max());
        } else if (key == "duration_s") {
            cfg.duration_s = parse_double(key, value);
            if (cfg.duration_s <= 0)
                throw ConfigError("duration_s must be positive");
        } else if (key == "transport") {
            cfg.transport = parse_transport(value);
        } else if (key == "substeps") {
            cfg.substeps = parse_unsigned<int>(key, value, 1000000);
            if (cfg.substeps < 1)
                throw ConfigError("substeps must be >= 1");
        } else if (key == "noise_bound") {
            cfg.noise_bound = parse_unsigned<std::uint32_t>(key, value, 1u << 30);
        } else if (key == "verify") {
            cfg.verify = parse_bool(value);
        } else if (key == "mode") {
            cfg.mode = parse_mode(value);
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

LoopConfig load_config(const std::string& path, const LoopConfig& base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigIoError("cannot open config file " + path);
    return parse_config(in, base);
}

}  // namespace rcfhe
