#ifndef PACSET_RECORD_IO_HPP
#define PACSET_RECORD_IO_HPP

#include "pacset/ast.hpp"
#include "pacset/calibrate.hpp"
#include "pacset/family.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pacset {

// Record files hold one JSON object per line:
//
//   {"id": "...",
//    "predicted": {"tokens": [...], "root": NODE},
//    "truth":     {"tokens": [...], "root": NODE}}
//
// NODE = {"label": str, "span": [begin, end], "nll": number (leaves only),
//         "children": [NODE, ...]}
//
// Blank lines are skipped. Every predicted leaf must carry an nll.

std::vector<CalibrationRecord> read_records(std::istream& in);
void write_records(std::ostream& out, const std::vector<CalibrationRecord>& records);

std::vector<CalibrationRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<CalibrationRecord>& records,
                  const std::filesystem::path& path);

/// Single-line JSON for a tree ({"tokens": ..., "root": ...}).
std::string tree_to_json(const AstTree& tree);
AstTree tree_from_json(const std::string& text);

/// Node JSON for a partial program; holes are written as {"hole": true}.
std::string partial_to_json(const PartialTree& partial);

/// A record together with its family, as written by `build`.
struct FamilyEntry {
    CalibrationRecord record;
    MonotoneFamily family;
    Method method = Method::Ilp;
    std::size_t max_holes = 1;
};

void write_families(std::ostream& out, const std::vector<FamilyEntry>& entries);
std::vector<FamilyEntry> read_families(std::istream& in);
std::vector<FamilyEntry> load_families(const std::filesystem::path& path);
void save_families(const std::vector<FamilyEntry>& entries, const std::filesystem::path& path);

std::string calibration_to_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const std::string& text);

/// Hand-encoded example: a record plus the subtrees to remove and the
/// expected outcome. Nodes marked {"remove": true} in the predicted tree
/// name the removal roots.
struct Fixture {
    CalibrationRecord record;
    std::size_t max_holes = 1;
    std::vector<NodeId> remove;
    bool expect_contains = false;
    std::string expect_render;
    std::string caption;
};

std::vector<Fixture> load_fixtures(const std::filesystem::path& path);

/// Text equality with all whitespace dropped. Renderings join tokens with
/// single spaces, so expected texts may keep their original spacing.
bool same_text_ignoring_space(std::string_view a, std::string_view b);

} // namespace pacset

#endif // PACSET_RECORD_IO_HPP
