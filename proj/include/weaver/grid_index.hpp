#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "weaver/geometry.hpp"
#include "weaver/rng.hpp"

namespace weaver {

/// Uniform-bin spatial index over a fixed point set. Bins are laid out
/// row-major and node ids are stored CSR-style sorted by bin, so the bins a
/// box covers form one contiguous id slice per bin row. Supports exact
/// membership queries and uniform sampling of the nodes inside a box
/// (rejection against the covering slices).
class GridIndex {
public:
    GridIndex(const std::vector<Point>& pts, double bin_side) : pts_(&pts) {
        bins_per_side_ =
            std::clamp(static_cast<int>(1.0 / std::max(bin_side, 1e-6)), 1, 2048);
        const std::size_t nbins =
            static_cast<std::size_t>(bins_per_side_) * bins_per_side_;
        std::vector<std::uint32_t> counts(nbins, 0);
        for (const auto& p : pts) ++counts[bin_of(p)];
        start_.assign(nbins + 1, 0);
        for (std::size_t b = 0; b < nbins; ++b) start_[b + 1] = start_[b] + counts[b];
        ids_.resize(pts.size());
        std::vector<std::uint32_t> cursor(start_.begin(), start_.end() - 1);
        for (std::uint32_t i = 0; i < pts.size(); ++i)
            ids_[cursor[bin_of(pts[i])]++] = i;
    }

    template <typename F>
    void for_candidates(const Box& box, F&& f) const {
        for_slices(box, [&](std::uint32_t lo, std::uint32_t hi) {
            for (std::uint32_t k = lo; k < hi; ++k) f(ids_[k]);
        });
    }

    /// All node ids inside the box, ascending.
    std::vector<std::uint32_t> nodes_in_box(const Box& box) const {
        std::vector<std::uint32_t> out;
        for_candidates(box, [&](std::uint32_t id) {
            if (box.contains((*pts_)[id])) out.push_back(id);
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t count_in_box(const Box& box) const {
        std::size_t c = 0;
        for_candidates(box, [&](std::uint32_t id) {
            if (box.contains((*pts_)[id])) ++c;
        });
        return c;
    }

    /// Repeated uniform sampling over the nodes inside one box.
    struct BoxSampler {
        const GridIndex* index = nullptr;
        Box box;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> slices;  // [lo, hi)
        std::uint64_t total = 0;    // candidates across slices
        std::size_t members = 0;    // exact nodes inside the box

        bool empty() const { return members == 0; }

        /// Uniform over the nodes inside the box; requires !empty().
        std::uint32_t sample(Rng& rng) const {
            for (;;) {
                std::uint64_t t = rng.next_index(total);
                for (const auto& [lo, hi] : slices) {
                    const std::uint64_t len = hi - lo;
                    if (t < len) {
                        const std::uint32_t id = index->ids_[lo + t];
                        if (box.contains((*index->pts_)[id])) return id;
                        break;
                    }
                    t -= len;
                }
            }
        }
    };

    BoxSampler make_sampler(const Box& box) const {
        BoxSampler s;
        s.index = this;
        s.box = box;
        for_slices(box, [&](std::uint32_t lo, std::uint32_t hi) {
            if (lo == hi) return;
            s.slices.emplace_back(lo, hi);
            s.total += hi - lo;
            for (std::uint32_t k = lo; k < hi; ++k)
                if (box.contains((*pts_)[ids_[k]])) ++s.members;
        });
        return s;
    }

private:
    std::size_t bin_of(Point p) const {
        auto clampi = [this](double c) {
            int i = static_cast<int>(c * bins_per_side_);
            return std::clamp(i, 0, bins_per_side_ - 1);
        };
        return static_cast<std::size_t>(clampi(p.y)) * bins_per_side_ + clampi(p.x);
    }

    /// Contiguous id slices covering the box's candidate bins, one per row.
    template <typename F>
    void for_slices(const Box& box, F&& f) const {
        const double h = box.side / 2.0;
        auto clampi = [this](double c) {
            int i = static_cast<int>(std::floor(c * bins_per_side_));
            return std::clamp(i, 0, bins_per_side_ - 1);
        };
        const int x0 = clampi(box.center.x - h);
        const int x1 = clampi(box.center.x + h);
        const int y0 = clampi(box.center.y - h);
        const int y1 = clampi(box.center.y + h);
        for (int y = y0; y <= y1; ++y) {
            const std::size_t b0 = static_cast<std::size_t>(y) * bins_per_side_ + x0;
            const std::size_t b1 = static_cast<std::size_t>(y) * bins_per_side_ + x1;
            f(start_[b0], start_[b1 + 1]);
        }
    }

    const std::vector<Point>* pts_;
    int bins_per_side_ = 1;
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> ids_;
};

}  // namespace weaver
