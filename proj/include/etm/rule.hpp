#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etm/affine.hpp"
#include "etm/error.hpp"

namespace etm {

using TileId = int;
/// An admissible finite sequence of 1-tile ids (address of an n-cylinder).
using Word = std::vector<uint8_t>;

/// One 1-tile of a two-tile subdivision rule.
///
/// `corners[j]` is the corner that the map sends to 0-vertex j; corner
/// coordinates live in the plane of `sheet`. For the built-in rules all
/// sheets except the two face planes are "pocket" planes (the flap map's
/// glued-on small pillow).
struct TileSpec {
    std::string name;
    int face = 0;        // 0-tile the 1-tile lies in (0 = white/front, 1 = black/back)
    int image_face = 0;  // f(tile)
    int sheet = 0;       // plane holding `corners`; faces use sheets 0 and 1
    std::vector<Vec2> corners;
};

/// Explicit edge identification inside a face pattern (used where coordinate
/// matching cannot see the gluing, e.g. across a slit or between pocket
/// planes). Both sides of a gluing always carry the same slot index, since a
/// shared edge joins corners with equal 0-vertex labels.
struct GlueSpec {
    int tile_a = 0, slot_a = 0;
    int tile_b = 0, slot_b = 0;
};

/// Assembled subdivision pattern of one 0-tile: how the face subdivides into
/// the 1-tiles lying in it, with shared edges and vertices resolved.
struct FacePattern {
    struct VertexRef {
        enum Kind { FaceCorner, EdgeMidpoint, Interior } kind;
        int index;  // 0-vertex label / boundary 0-edge index / interior ordinal
    };
    struct EdgeRef {
        enum Kind { BoundaryHalf, Interior } kind;
        int index;  // boundary: 0-edge index; interior: ordinal
        int half;   // boundary only: 0 = adjacent to 0-vertex `index`, 1 = other half
    };
    struct Child {
        TileId tile;
        std::vector<EdgeRef> slots;      // m boundary edges, slot j between labels j, j+1
        std::vector<VertexRef> corners;  // m corners ordered by 0-vertex label
    };
    std::vector<Child> children;
    int interior_vertex_count = 0;
    int interior_edge_count = 0;
};

struct SubdivisionRule {
    std::string name;
    int degree = 0;      // deg f; one_tiles.size() == 2 * degree
    int post_count = 0;  // m = card(post f); every tile is an m-gon
    std::vector<std::string> vertex_labels;  // m 0-vertex names
    std::vector<Vec2> model_polygon;         // m corners of the 0-tile model, by label
    std::vector<std::string> sheet_names;    // [0]=front plane, [1]=back plane, then pockets
    std::vector<TileSpec> tiles;
    std::vector<GlueSpec> glues;
    double lambda_default = 2.0;  // visual-metric expansion factor default

    // Derived on validation.
    std::vector<Affine> charts;        // per tile: model polygon -> tile corners
    std::vector<FacePattern> patterns; // per face
    double max_contraction = 0.0;      // largest chart linear norm
    long tile_budget = 2'000'000;

    int tile_count() const { return static_cast<int>(tiles.size()); }
    int find_tile(const std::string& tile_name) const;
    /// A(X, X') = 1 iff the rule places X' inside f(X).
    bool admissible(TileId x, TileId y) const { return tiles[y].face == tiles[x].image_face; }
};

/// Built-in rules: pillow_lattes (deg 4, m 4), barycentric (deg 6, m 3),
/// flap (deg 5, m 4).
SubdivisionRule load_builtin(const std::string& name);
std::vector<std::string> builtin_rule_names();

/// Plain sectioned key=value rule file (format documented in the README).
SubdivisionRule load_rule_file(const std::string& path);

/// Checks structural invariants and fills the derived fields (charts,
/// patterns). Throws Error{validation} on failure. load_builtin and
/// load_rule_file both return validated rules.
void validate_rule(SubdivisionRule& rule);

}  // namespace etm
