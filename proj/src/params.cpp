#include "rcfhe/params.hpp"

#include <sstream>

namespace rcfhe {

Params make_params(std::uint32_t n, std::uint32_t m, std::uint32_t ell, std::uint32_t m_q,
                   std::uint32_t n_q, std::uint32_t noise_bound)
{
    if (n == 0)
        throw InvalidParams("n must be positive");
    if (m == 0)
        throw InvalidParams("m must be positive");
    if (ell < 2 || ell > 64)
        throw InvalidParams("ell must lie in [2, 64]");
    if (m_q == 0 || n_q == 0)
        throw InvalidParams("m_q and n_q must be positive");
    if (std::uint64_t{m_q} + 2 * std::uint64_t{n_q} > ell)
        throw InvalidParams("m_q + 2*n_q exceeds ell: a Q-format product would not fit one word");
    // m * B < 2^(ell-2), evaluated without overflow.
    const unsigned __int128 budget = static_cast<unsigned __int128>(1) << (ell - 2);
    if (static_cast<unsigned __int128>(m) * noise_bound >= budget)
        throw InvalidParams("m * noise_bound must stay below 2^(ell-2)");

    Params p;
    p.n = n;
    p.m = m;
    p.ell = ell;
    p.m_q = m_q;
    p.n_q = n_q;
    p.noise_bound = noise_bound;
    p.N = (n + 1) * ell;
    return p;
}

Params default_params() { return make_params(7, 7, 64, 10, 22, 15); }

std::string describe(const Params& p)
{
    std::ostringstream os;
    os << "n=" << p.n << " m=" << p.m << " ell=" << p.ell << " N=" << p.N << " Q" << p.m_q
       << "." << p.n_q << " B=" << p.noise_bound;
    return os.str();
}

}  // namespace rcfhe
