#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "s2c/value.hpp"

namespace s2c {

/// Rows of variable → value bindings from either evaluator.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;

    bool operator==(const ResultTable& other) const {
        if (columns != other.columns || rows.size() != other.rows.size()) return false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != other.rows[i].size()) return false;
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                if (!values_equal(rows[i][j], other.rows[i][j])) return false;
        }
        return true;
    }
};

/// {"columns": [...], "rows": [[...]]}; node values appear as {"uri": ...}.
nlohmann::json result_table_to_json(const ResultTable& table);
ResultTable result_table_from_json(const nlohmann::json& j);

}  // namespace s2c
