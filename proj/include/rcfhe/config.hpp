#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rcfhe/encrypted_loop.hpp"

namespace rcfhe {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The file could not be opened or read.
class ConfigIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` lines; '#' starts a comment. Keys: seed, duration_s,
/// transport (inprocess | socket), substeps, noise_bound, verify (true | false),
/// mode (encrypted | fixed | float). Unknown keys and bad values throw
/// ConfigError. Keys not present keep their value from `base`.
LoopConfig parse_config(std::istream& is, const LoopConfig& base = {});
LoopConfig load_config(const std::string& path, const LoopConfig& base = {});

Transport parse_transport(const std::string& s);
LoopMode parse_mode(const std::string& s);
bool parse_bool(const std::string& s);

}  // namespace rcfhe
