#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rcfhe/params.hpp"
#include "rcfhe/rng.hpp"
#include "rcfhe/word.hpp"

namespace rcfhe {

/// s = [1, -t] mod q.
struct SecretKey {
    Params params;
    std::vector<Word> s;
};

/// A = [b, B] with b = B*t + e, so A*s = e (mod q).
struct PublicKey {
    Params params;
    WordMatrix A;
};

struct KeyPair {
    SecretKey secret;
    PublicKey pub;
};

/// m words, each the mod-q image of an integer uniform on [-B, B].
std::vector<Word> sample_noise(const Params& params, Rng& rng);

KeyPair keygen(const Params& params, Rng& rng);

/// Builds keys from explicit t (n words), B (m x n) and e (m words).
KeyPair assemble_keys(const Params& params, std::span<const Word> t, const WordMatrix& B,
                      std::span<const Word> e);

/// Key file: "RCKY", version byte, params block, s words, A words (row-major).
void write_key_file(std::ostream& os, const KeyPair& keys);
KeyPair read_key_file(std::istream& is);

/// Short hex digest of the serialized key file.
std::string fingerprint(const KeyPair& keys);

}  // namespace rcfhe
