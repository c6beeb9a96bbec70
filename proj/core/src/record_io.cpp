#include "pacset/record_io.hpp"

#include "pacset/errors.hpp"

#include "json.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pacset {

using nlohmann::json;

namespace {

enum class NodeMode { Record, Fixture };

AstNode node_from_json(const json& j, NodeMode mode, std::vector<bool>* remove_marks) {
    if (!j.is_object()) throw InputError("node must be a JSON object");
    if (j.contains("hole")) throw InputError("holes are not allowed in record trees");
    if (!j.contains("label") || !j["label"].is_string()) {
        throw InputError("node is missing a string 'label'");
    }
    AstNode node;
    node.label = j["label"].get<std::string>();
    if (!j.contains("span") || !j["span"].is_array() || j["span"].size() != 2
        || !j["span"][0].is_number_unsigned() || !j["span"][1].is_number_unsigned()) {
        throw InputError("node '" + node.label + "' needs 'span': [begin, end]");
    }
    node.span = {j["span"][0].get<std::size_t>(), j["span"][1].get<std::size_t>()};
    if (j.contains("nll")) {
        if (!j["nll"].is_number()) throw InputError("node '" + node.label + "' nll is not a number");
        node.nll = j["nll"].get<double>();
    }
    bool marked = false;
    if (j.contains("remove")) {
        if (mode != NodeMode::Fixture || !remove_marks || !j["remove"].is_boolean()) {
            throw InputError("unexpected 'remove' marker");
        }
        marked = j["remove"].get<bool>();
    }
    if (remove_marks) remove_marks->push_back(marked);
    if (j.contains("children")) {
        if (!j["children"].is_array()) throw InputError("'children' must be an array");
        for (const auto& c : j["children"]) {
            node.children.push_back(node_from_json(c, mode, remove_marks));
        }
    }
    return node;
}

json node_to_json(const AstTree& tree, NodeId v, const PartialTree* partial) {
    if (partial && partial->is_hole(v)) return json{{"hole", true}};
    json j;
    j["label"] = tree.label(v);
    j["span"] = {tree.span(v).begin, tree.span(v).end};
    if (const auto nll = tree.nll(v)) j["nll"] = *nll;
    if (!tree.is_leaf(v)) {
        json kids = json::array();
        for (NodeId c : tree.children(v)) kids.push_back(node_to_json(tree, c, partial));
        j["children"] = std::move(kids);
    }
    return j;
}

json tree_json(const AstTree& tree) {
    return json{{"tokens", tree.tokens()}, {"root", node_to_json(tree, AstTree::root(), nullptr)}};
}

TreePtr tree_from(const json& j, NodeMode mode, std::vector<bool>* remove_marks) {
    if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()
        || !j.contains("root")) {
        throw InputError("tree must be {\"tokens\": [...], \"root\": {...}}");
    }
    std::vector<std::string> tokens;
    for (const auto& t : j["tokens"]) {
        if (!t.is_string()) throw InputError("tokens must be strings");
        tokens.push_back(t.get<std::string>());
    }
    return make_tree(std::move(tokens), node_from_json(j["root"], mode, remove_marks));
}

std::string record_id(const json& j) {
    if (j.is_object() && j.contains("id") && j["id"].is_string()) return j["id"].get<std::string>();
    return "<unknown>";
}

CalibrationRecord record_from(const json& j, NodeMode mode, std::vector<bool>* remove_marks) {
    CalibrationRecord record;
    if (!j.is_object()) throw InputError("record must be a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) throw InputError("record needs a string 'id'");
    record.id = j["id"].get<std::string>();
    if (!j.contains("predicted") || !j.contains("truth")) {
        throw InputError("record needs 'predicted' and 'truth' trees");
    }
    record.predicted = tree_from(j["predicted"], mode, remove_marks);
    record.truth = tree_from(j["truth"], mode, nullptr);
    if (!record.predicted->fully_scored()) {
        throw InputError("every predicted leaf needs an nll");
    }
    return record;
}

json record_json(const CalibrationRecord& record) {
    return json{{"id", record.id},
                {"predicted", tree_json(*record.predicted)},
                {"truth", tree_json(*record.truth)}};
}

json budget_json(double b) { return std::isinf(b) ? json("inf") : json(b); }

double budget_from(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return kNoBudget;
    if (!j.is_number()) throw InputError("budget must be a number or \"inf\"");
    return j.get<double>();
}

LevelGrid grid_from(const json& j) {
    if (!j.is_array()) throw InputError("grid must be an array");
    std::vector<double> budgets;
    for (const auto& b : j) budgets.push_back(budget_from(b));
    return LevelGrid(std::move(budgets));
}

json grid_json(const LevelGrid& grid) {
    json out = json::array();
    for (double b : grid.budgets()) out.push_back(budget_json(b));
    return out;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw LoadError("<unparsed>", line_no, e.what());
        }
        try {
            fn(j);
        } catch (const InputError& e) {
            throw LoadError(record_id(j), line_no, e.what());
        } catch (const json::exception& e) {
            throw LoadError(record_id(j), line_no, e.what());
        }
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    return out;
}

} // namespace

std::vector<CalibrationRecord> read_records(std::istream& in) {
    std::vector<CalibrationRecord> records;
    for_each_line(in, [&](const json& j) {
        records.push_back(record_from(j, NodeMode::Record, nullptr));
    });
    return records;
}

void write_records(std::ostream& out, const std::vector<CalibrationRecord>& records) {
    for (const auto& record : records) out << record_json(record).dump() << '\n';
}

std::vector<CalibrationRecord> load_records(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_records(in);
}

void save_records(const std::vector<CalibrationRecord>& records,
                  const std::filesystem::path& path) {
    auto out = open_out(path);
    write_records(out, records);
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::string tree_to_json(const AstTree& tree) { return tree_json(tree).dump(); }

AstTree tree_from_json(const std::string& text) {
    return *tree_from(json::parse(text), NodeMode::Record, nullptr);
}

std::string partial_to_json(const PartialTree& partial) {
    return node_to_json(partial.source(), AstTree::root(), &partial).dump();
}

// --- families --------------------------------------------------------------

void write_families(std::ostream& out, const std::vector<FamilyEntry>& entries) {
    for (const auto& entry : entries) {
        json j = record_json(entry.record);
        j["method"] = to_string(entry.method);
        j["m"] = entry.max_holes;
        j["grid"] = grid_json(entry.family.grid);
        json levels = json::array();
        for (std::size_t i = 0; i < entry.family.levels.size(); ++i) {
            const PartialTree& p = entry.family.levels[i];
            levels.push_back(json{{"budget", budget_json(entry.family.grid[i])},
                                  {"roots", std::vector<NodeId>(p.holes().begin(), p.holes().end())},
                                  {"retained_nll", leaf_nll_total(p)},
                                  {"size", size_metric(p)},
                                  {"render", render(p).text()}});
        }
        j["levels"] = std::move(levels);
        out << j.dump() << '\n';
    }
}

std::vector<FamilyEntry> read_families(std::istream& in) {
    std::vector<FamilyEntry> entries;
    for_each_line(in, [&](const json& j) {
        FamilyEntry entry;
        entry.record = record_from(j, NodeMode::Record, nullptr);
        entry.method = parse_method(j.at("method").get<std::string>());
        entry.max_holes = j.at("m").get<std::size_t>();
        const LevelGrid grid = grid_from(j.at("grid"));
        std::vector<std::vector<NodeId>> roots;
        for (const auto& level : j.at("levels")) {
            roots.push_back(level.at("roots").get<std::vector<NodeId>>());
        }
        const RemovalPlan plan = make_plan(*entry.record.predicted, std::move(roots));
        entry.family = family_from_plan(entry.record.predicted, grid, plan);
        entries.push_back(std::move(entry));
    });
    return entries;
}

std::vector<FamilyEntry> load_families(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_families(in);
}

void save_families(const std::vector<FamilyEntry>& entries, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_families(out, entries);
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

// --- calibration -----------------------------------------------------------

std::string calibration_to_json(const CalibrationResult& result) {
    json j;
    j["chosen_level"] = result.chosen_level;
    j["chosen_budget"] = budget_json(result.chosen_budget);
    j["errors_at_level"] = result.errors_at_level;
    j["permitted"] = result.permitted ? json(*result.permitted) : json(nullptr);
    j["fallback"] = result.fallback;
    j["epsilon"] = result.epsilon;
    j["delta"] = result.delta;
    j["n"] = result.n;
    j["per_level_errors"] = result.per_level_errors;
    j["grid"] = grid_json(result.grid);
    return j.dump();
}

CalibrationResult calibration_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        CalibrationResult r;
        r.chosen_level = j.at("chosen_level").get<std::size_t>();
        r.chosen_budget = budget_from(j.at("chosen_budget"));
        r.errors_at_level = j.at("errors_at_level").get<std::size_t>();
        if (!j.at("permitted").is_null()) r.permitted = j["permitted"].get<std::size_t>();
        r.fallback = j.at("fallback").get<bool>();
        r.epsilon = j.at("epsilon").get<double>();
        r.delta = j.at("delta").get<double>();
        r.n = j.at("n").get<std::size_t>();
        r.per_level_errors = j.at("per_level_errors").get<std::vector<std::size_t>>();
        r.grid = grid_from(j.at("grid"));
        if (r.chosen_level >= r.grid.size()) throw InputError("chosen level outside the grid");
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("bad calibration file: ") + e.what());
    }
}

// --- fixtures --------------------------------------------------------------

std::vector<Fixture> load_fixtures(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<Fixture> fixtures;
    for_each_line(in, [&](const json& j) {
        Fixture f;
        std::vector<bool> marks;
        f.record = record_from(j, NodeMode::Fixture, &marks);
        for (NodeId v = 0; v < marks.size(); ++v) {
            if (marks[v]) f.remove.push_back(v);
        }
        f.max_holes = j.at("m").get<std::size_t>();
        f.expect_contains = j.at("expect_contains").get<bool>();
        f.expect_render = j.at("expect_render").get<std::string>();
        f.caption = j.value("caption", std::string{});
        fixtures.push_back(std::move(f));
    });
    return fixtures;
}

bool same_text_ignoring_space(std::string_view a, std::string_view b) {
    auto strip = [](std::string_view s) {
        std::string out;
        for (char c : s) {
            if (!std::isspace(static_cast<unsigned char>(c))) out += c;
        }
        return out;
    };
    return strip(a) == strip(b);
}

} // namespace pacset
