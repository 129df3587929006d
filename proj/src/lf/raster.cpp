#include "epinet/lf/raster.hpp"

#include <algorithm>

namespace epinet::lf {

Mask dilate(const Mask& m, int radius) {
    if (radius <= 0) return m;
    Mask out(m.height(), m.width());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(y, x)) continue;
            for (int yy = std::max(0, y - radius); yy <= std::min(m.height() - 1, y + radius); ++yy)
                for (int xx = std::max(0, x - radius); xx <= std::min(m.width() - 1, x + radius); ++xx)
                    out.at(yy, xx) = 1;
        }
    }
    return out;
}

}  // namespace epinet::lf
