#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "etm/rule.hpp"

namespace etm {

/// A point of the model surface: coordinates in one drawing plane.
/// For pillow/barycentric the sheets are exactly the two faces; the flap's
/// pocket tiles live on extra sheets spawned during refinement.
struct ModelPoint {
    int sheet = 0;
    Vec2 pos;
};

/// The level-n cell decomposition D^n(f, C): tiles, edges, vertices with full
/// incidence, the cellular map action into level n-1, and per-tile affine
/// frames realizing the geometry.
struct CellDecomposition {
    int level = 0;
    std::shared_ptr<const SubdivisionRule> rule;

    struct Sheet {
        std::string label;
        int base_face = -1;  // >= 0 for the two face planes
    };
    std::vector<Sheet> sheets;

    // Tiles. Addresses are stored contiguously, `level` bytes per tile, in
    // lexicographic order (tile identity IS its address; geometry derived).
    std::vector<uint8_t> addresses;
    std::vector<int> tile_sheet;
    std::vector<Affine> tile_frame;  // model-polygon plane -> sheet plane
    std::vector<int> tile_type;     // the 0-tile f^level(T); subdivision pattern used
    std::vector<int> tile_corner;   // m entries per tile: vertex ids by 0-vertex label
    std::vector<int> tile_edge;     // m entries per tile: edge j between labels j, j+1
    std::vector<int> tile_map;      // image tile in D^{level-1} (level >= 1)

    std::vector<std::array<int, 2>> edge_vertex;
    std::vector<std::array<int, 2>> edge_tile;
    std::vector<int> edge_map;

    std::vector<int> vertex_sheet;
    std::vector<Vec2> vertex_pos;
    std::vector<std::vector<int>> vertex_tiles;  // incident tiles (sorted)
    std::vector<int> vertex_map;

    int m() const { return rule->post_count; }
    int tile_count() const { return static_cast<int>(tile_sheet.size()); }
    int edge_count() const { return static_cast<int>(edge_vertex.size()); }
    int vertex_count() const { return static_cast<int>(vertex_sheet.size()); }

    Word tile_address(int t) const;
    /// Index of the tile with the given address, or -1.
    int find_tile(const Word& w) const;
    std::vector<Vec2> tile_polygon(int t) const;
    /// 2 deg_{f^n}(v) incident tiles around v; local degree = count / 2.
    int vertex_local_degree(int v) const { return static_cast<int>(vertex_tiles[v].size()) / 2; }
};

/// Levels 0..n of D^*(f, C). Throws Error{resource} past the tile budget.
std::vector<CellDecomposition> refine_tower(const std::shared_ptr<const SubdivisionRule>& rule, int n);

/// Convenience: the level-n decomposition alone (still built bottom-up).
CellDecomposition refine(const std::shared_ptr<const SubdivisionRule>& rule, int n);

/// Flower W^n(v): ids of the tiles incident to vertex v.
std::vector<int> flower(const CellDecomposition& d, int v);

/// Tiles of d containing the point (same sheet, polygon membership with tol).
std::vector<int> locate_tiles(const CellDecomposition& d, const ModelPoint& x, double tol = 1e-12);

/// Bouquet U^n: union of all tiles sharing at least one vertex with a tile in
/// `seeds` (cells of these complexes intersect iff they share a vertex).
std::vector<int> bouquet_of_tiles(const CellDecomposition& d, const std::vector<int>& seeds);
std::vector<int> bouquet(const CellDecomposition& d, const ModelPoint& x);
std::vector<int> bouquet(const CellDecomposition& d, int tile);

}  // namespace etm
