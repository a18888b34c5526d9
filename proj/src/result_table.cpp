#include "s2c/result_table.hpp"

#include <nlohmann/json.hpp>

namespace s2c {

nlohmann::json result_table_to_json(const ResultTable& table) {
    nlohmann::json j;
    j["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const Value& v : row) {
            switch (v.index()) {
                case 0: cells.push_back(nullptr); break;
                case 1: cells.push_back(std::get<bool>(v)); break;
                case 2: cells.push_back(std::get<std::int64_t>(v)); break;
                case 3: cells.push_back(std::get<double>(v)); break;
                case 4: cells.push_back(std::get<std::string>(v)); break;
                default: cells.push_back(nlohmann::json{{"uri", std::get<Iri>(v).uri}}); break;
            }
        }
        rows.push_back(std::move(cells));
    }
    j["rows"] = std::move(rows);
    return j;
}

ResultTable result_table_from_json(const nlohmann::json& j) {
    ResultTable table;
    for (const auto& c : j.at("columns")) table.columns.push_back(c.get<std::string>());
    for (const auto& row : j.at("rows")) {
        std::vector<Value> cells;
        for (const auto& cell : row) {
            if (cell.is_null()) cells.emplace_back(Null{});
            else if (cell.is_boolean()) cells.emplace_back(cell.get<bool>());
            else if (cell.is_number_integer()) cells.emplace_back(cell.get<std::int64_t>());
            else if (cell.is_number()) cells.emplace_back(cell.get<double>());
            else if (cell.is_string()) cells.emplace_back(cell.get<std::string>());
            else if (cell.is_object() && cell.contains("uri"))
                cells.emplace_back(Iri{cell.at("uri").get<std::string>()});
            else cells.emplace_back(Null{});
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

}  // namespace s2c
