#include "rcfhe/fixed_point.hpp"

#include <cmath>
#include <sstream>

namespace rcfhe {

double QFormat::lower() const { return -std::ldexp(1.0, static_cast<int>(m_q) - 1); }
double QFormat::upper() const { return std::ldexp(1.0, static_cast<int>(m_q) - 1); }

QFormat qformat_of(const Params& p) { return QFormat{p.m_q, p.n_q, p.ell}; }

Word q_encode(double beta, const QFormat& fmt)
{
    if (!std::isfinite(beta) || beta < fmt.lower() || beta >= fmt.upper()) {
        std::ostringstream os;
        os << "value " << beta << " outside Q" << fmt.m_q << "." << fmt.n_q << " range";
        throw OutOfRange(os.str());
    }
    // std::round rounds half away from zero.
    const double scaled = std::round(std::ldexp(beta, static_cast<int>(fmt.n_q)));
    const double limit = std::ldexp(1.0, static_cast<int>(fmt.m_q + fmt.n_q) - 1);
    if (scaled >= limit)
        throw OutOfRange("value rounds up past the top of the Q range");
    return embed(static_cast<std::int64_t>(scaled), fmt.ell);
}

double q_decode(Word word, unsigned frac_bits, unsigned ell)
{
    return std::ldexp(static_cast<double>(centered(word, ell)), -static_cast<int>(frac_bits));
}

Word rescale(Word word, unsigned shift, unsigned ell)
{
    const std::int64_t v = centered(word, ell);
    return embed(shift >= 64 ? (v < 0 ? -1 : 0) : (v >> shift), ell);
}

}  // namespace rcfhe
