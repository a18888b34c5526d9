#include "s2c/value.hpp"

#include <cstdio>

namespace s2c {

std::string value_to_display(const Value& v) {
    switch (v.index()) {
        case 0: return "null";
        case 1: return std::get<bool>(v) ? "true" : "false";
        case 2: return std::to_string(std::get<std::int64_t>(v));
        case 3: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(v));
            return buf;
        }
        case 4: return std::get<std::string>(v);
        default: return std::get<Iri>(v).uri;
    }
}

}  // namespace s2c
