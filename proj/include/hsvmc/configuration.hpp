#pragma once

// Particle configuration on the torus with a cell-list neighbour index.
//
// Cells have side >= cutoff, so the 27-cell stencil around a particle is
// guaranteed to contain every neighbour within the cutoff.  Boxes shorter
// than three cells fall back to an all-pairs scan.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hsvmc/errors.hpp"
#include "hsvmc/geometry.hpp"
#include "hsvmc/rng.hpp"

namespace hsvmc {

class Configuration {
  public:
    Configuration(const SimulationBox& box, std::vector<Vec3> positions, double cutoff)
        : box_(box), cutoff_(cutoff), positions_(std::move(positions)) {
        if (!(cutoff > 0.0)) throw GeometryError("configuration: cutoff must be positive");
        if (2.0 * cutoff > box.side())
            throw GeometryError("configuration: need 2 * cutoff <= box side");
        for (auto& p : positions_) p = box_.wrap(p);
        n_side_ = int(box.side() / cutoff);
        if (n_side_ >= 3) build_cells();
    }

    const SimulationBox& box() const { return box_; }
    double cutoff() const { return cutoff_; }
    std::size_t size() const { return positions_.size(); }
    const Vec3& position(std::size_t i) const { return positions_[i]; }
    const std::vector<Vec3>& positions() const { return positions_; }
    bool uses_cells() const { return n_side_ >= 3; }
    int cells_per_side() const { return n_side_; }

    /// Move particle i; the position is wrapped and the cell index updated.
    void set_position(std::size_t i, Vec3 p) {
        p = box_.wrap(p);
        positions_[i] = p;
        if (!uses_cells()) return;
        const int c = cell_of(p);
        if (c == cell_index_[i]) return;
        remove_from_cell(i);
        cell_index_[i] = c;
        slot_in_cell_[i] = int(cells_[c].size());
        cells_[c].push_back(std::uint32_t(i));
    }

    /// Visit every j != i that could lie within the cutoff of particle i.
    /// The candidate set is a superset of the true neighbour set.
    template <class F>
    void for_each_candidate(std::size_t i, F&& fn) const {
        if (!uses_cells()) {
            for (std::size_t j = 0; j < positions_.size(); ++j)
                if (j != i) fn(j);
            return;
        }
        visit_stencil(cell_index_[i], [&](std::uint32_t j) {
            if (j != i) fn(std::size_t(j));
        });
    }

    /// Visit every particle that could lie within the cutoff of a free point.
    template <class F>
    void for_each_candidate_near(Vec3 y, F&& fn) const {
        if (!uses_cells()) {
            for (std::size_t j = 0; j < positions_.size(); ++j) fn(j);
            return;
        }
        visit_stencil(cell_of(box_.wrap(y)), [&](std::uint32_t j) { fn(std::size_t(j)); });
    }

  private:
    int cell_of(Vec3 p) const {
        const double inv = n_side_ / box_.side();
        int ix = int((p.x + 0.5 * box_.side()) * inv);
        int iy = int((p.y + 0.5 * box_.side()) * inv);
        int iz = int((p.z + 0.5 * box_.side()) * inv);
        if (ix >= n_side_) ix = n_side_ - 1;
        if (iy >= n_side_) iy = n_side_ - 1;
        if (iz >= n_side_) iz = n_side_ - 1;
        return (ix * n_side_ + iy) * n_side_ + iz;
    }

    void build_cells() {
        cells_.assign(std::size_t(n_side_) * n_side_ * n_side_, {});
        cell_index_.resize(positions_.size());
        slot_in_cell_.resize(positions_.size());
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            const int c = cell_of(positions_[i]);
            cell_index_[i] = c;
            slot_in_cell_[i] = int(cells_[c].size());
            cells_[c].push_back(std::uint32_t(i));
        }
    }

    void remove_from_cell(std::size_t i) {
        auto& members = cells_[cell_index_[i]];
        const int slot = slot_in_cell_[i];
        const std::uint32_t moved = members.back();
        members[slot] = moved;
        slot_in_cell_[moved] = slot;
        members.pop_back();
    }

    template <class F>
    void visit_stencil(int cell, F&& fn) const {
        const int iz = cell % n_side_;
        const int iy = (cell / n_side_) % n_side_;
        const int ix = cell / (n_side_ * n_side_);
        for (int dx = -1; dx <= 1; ++dx) {
            const int jx = (ix + dx + n_side_) % n_side_;
            for (int dy = -1; dy <= 1; ++dy) {
                const int jy = (iy + dy + n_side_) % n_side_;
                for (int dz = -1; dz <= 1; ++dz) {
                    const int jz = (iz + dz + n_side_) % n_side_;
                    for (std::uint32_t j : cells_[(jx * n_side_ + jy) * n_side_ + jz]) fn(j);
                }
            }
        }
    }

    SimulationBox box_;
    double cutoff_;
    int n_side_ = 0;
    std::vector<Vec3> positions_;
    std::vector<std::vector<std::uint32_t>> cells_;
    std::vector<int> cell_index_;
    std::vector<int> slot_in_cell_;
};

/// Jittered simple-cubic start configuration.  Dilution guard: the hard cores
/// may fill at most 30% of the box.
inline Configuration init_configuration(const SimulationBox& box, std::size_t n_particles,
                                        double hard_core, double cutoff, std::uint64_t seed,
                                        std::uint32_t chain) {
    if (n_particles == 0) throw DomainError("init_configuration: need at least one particle");
    const double core_volume =
        n_particles * 4.0 * M_PI * hard_core * hard_core * hard_core / 3.0;
    if (core_volume >= 0.3 * box.volume())
        throw PackingError("init_configuration: box too dense for the hard cores");

    int per_side = 1;
    while (std::size_t(per_side) * per_side * per_side < n_particles) ++per_side;
    const double spacing = box.side() / per_side;

    std::vector<Vec3> pos;
    pos.reserve(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i) {
        const int ix = int(i) / (per_side * per_side);
        const int iy = (int(i) / per_side) % per_side;
        const int iz = int(i) % per_side;
        const auto j01 = uniform_pair(seed, chain, RandPurpose::kInit, 0, std::uint32_t(i), 0);
        const auto j23 = uniform_pair(seed, chain, RandPurpose::kInit, 0, std::uint32_t(i), 1);
        // 5% jitter breaks lattice symmetry without risking core overlap.
        const Vec3 site = {-0.5 * box.side() + (ix + 0.5 + 0.1 * (j01.first - 0.5)) * spacing,
                           -0.5 * box.side() + (iy + 0.5 + 0.1 * (j01.second - 0.5)) * spacing,
                           -0.5 * box.side() + (iz + 0.5 + 0.1 * (j23.first - 0.5)) * spacing};
        pos.push_back(site);
    }
    Configuration config(box, std::move(pos), cutoff);
    for (std::size_t i = 0; i + 1 < n_particles; ++i)
        for (std::size_t j = i + 1; j < n_particles; ++j)
            if (config.box().distance(config.position(i), config.position(j)) <= hard_core)
                throw PackingError("init_configuration: lattice start has overlapping cores");
    return config;
}

}  // namespace hsvmc
