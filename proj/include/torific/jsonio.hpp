#pragma once
// JSON emission at 17 significant digits so every double round-trips exactly,
// plus small file helpers.  Uses insertion-ordered objects so identical runs
// produce byte-identical documents.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "torific/common.hpp"

namespace torific {

using Json = nlohmann::ordered_json;

namespace jsondetail {

inline void dump17_impl(const Json& j, std::string& out, int depth) {
    const std::string pad(2 * depth, ' ');
    const std::string pad1(2 * (depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad1;
                out += Json(it.key()).dump();
                out += ": ";
                dump17_impl(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad1;
                dump17_impl(el, out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (!(x == x) || x > 1e308 || x < -1e308)
                throw NumericalError("non-finite number in JSON output");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

}  // namespace jsondetail

inline std::string dump17(const Json& j) {
    std::string out;
    jsondetail::dump17_impl(j, out, 0);
    out += "\n";
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open for writing: " + path);
    out << text;
    if (!out.good()) throw UsageError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace torific
