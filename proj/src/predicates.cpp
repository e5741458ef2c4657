#include "roomtex/predicates.hpp"

#include <gmpxx.h>

#include <cmath>

namespace roomtex {

namespace {

// Shewchuk's static filter constants (epsilon = 2^-53).
constexpr double kEps = 1.1102230246251565e-16;
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccErrBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
    // mpq_class construction from double is exact.
    mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    mpq_class det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    return sgn(det);
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    mpq_class adx(a.x), ady(a.y), bdx(b.x), bdy(b.y), cdx(c.x), cdy(c.y);
    mpq_class dx(d.x), dy(d.y);
    adx -= dx; ady -= dy;
    bdx -= dx; bdy -= dy;
    cdx -= dx; cdy -= dy;
    mpq_class alift = adx * adx + ady * ady;
    mpq_class blift = bdx * bdx + bdy * bdy;
    mpq_class clift = cdx * cdx + cdy * cdy;
    mpq_class det = alift * (bdx * cdy - cdx * bdy) - blift * (adx * cdy - cdx * ady) +
                    clift * (adx * bdy - bdx * ady);
    return sgn(det);
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    double detleft = (a.x - c.x) * (b.y - c.y);
    double detright = (a.y - c.y) * (b.x - c.x);
    double det = detleft - detright;

    double detsum;
    if (detleft > 0) {
        if (detright <= 0) return sign_of(det);
        detsum = detleft + detright;
    } else if (detleft < 0) {
        if (detright >= 0) return sign_of(det);
        detsum = -detleft - detright;
    } else {
        return sign_of(det);
    }
    if (std::abs(det) >= kCcwErrBound * detsum) return sign_of(det);
    return orient2d_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;

    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double alift = adx * adx + ady * ady;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double blift = bdx * bdx + bdy * bdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double clift = cdx * cdx + cdy * cdy;

    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                 clift * (adxbdy - bdxady);

    double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                       (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                       (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    if (std::abs(det) >= kIccErrBound * permanent) return sign_of(det);
    return incircle_exact(a, b, c, d);
}

}  // namespace roomtex
