#pragma once

#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dst/evidence.hpp"
#include "dst/frame.hpp"

namespace dst {

// Parse failure with a stable kind string ("malformed", "unknown-label",
// "duplicate-set", "empty-set", "bad-mass", "sum-deviation") next to the
// human-readable diagnostic.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

namespace detail {

inline std::string focal_field(std::size_t i, const char* leaf) {
    return "focal[" + std::to_string(i) + "]." + leaf;
}

} // namespace detail

// Read a BPA document: {"frame":[labels...],"focal":[{"set":[...],"mass":x}...]}.
// Masses summing to 1 within kMassTol are renormalized.
inline MassFunction parse_bpa(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed", e.what());
    }
    if (!doc.is_object() || !doc.contains("frame") || !doc.contains("focal"))
        throw ParseError("malformed", "document must be an object with \"frame\" and \"focal\"");
    const nlohmann::json& jframe = doc["frame"];
    if (!jframe.is_array() || jframe.empty())
        throw ParseError("malformed", "\"frame\" must be a non-empty array of labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < jframe.size(); ++i) {
        if (!jframe[i].is_string())
            throw ParseError("malformed", "frame[" + std::to_string(i) + "] is not a string");
        labels.push_back(jframe[i].get<std::string>());
    }
    Frame frame = [&] {
        try {
            return Frame(std::move(labels));
        } catch (const std::invalid_argument& e) {
            throw ParseError("malformed", e.what());
        }
    }();

    const nlohmann::json& jfocal = doc["focal"];
    if (!jfocal.is_array() || jfocal.empty())
        throw ParseError("malformed", "\"focal\" must be a non-empty array");
    MassFunction::FocalMap focal;
    double sum = 0.0;
    for (std::size_t i = 0; i < jfocal.size(); ++i) {
        const nlohmann::json& entry = jfocal[i];
        if (!entry.is_object() || !entry.contains("set") || !entry.contains("mass"))
            throw ParseError("malformed",
                             detail::focal_field(i, "") + " needs \"set\" and \"mass\"");
        const nlohmann::json& jset = entry["set"];
        if (!jset.is_array())
            throw ParseError("malformed", detail::focal_field(i, "set") + " is not an array");
        if (jset.empty())
            throw ParseError("empty-set", detail::focal_field(i, "set") + " is the empty set");
        SubsetMask mask = 0;
        for (std::size_t j = 0; j < jset.size(); ++j) {
            if (!jset[j].is_string())
                throw ParseError("malformed",
                                 detail::focal_field(i, "set") + "[" + std::to_string(j) +
                                     "] is not a string");
            const std::string label = jset[j].get<std::string>();
            const int x = frame.index_of(label);
            if (x < 0)
                throw ParseError("unknown-label", detail::focal_field(i, "set") +
                                                      " names \"" + label +
                                                      "\" which is not in the frame");
            mask |= singleton_mask(x);
        }
        if (!entry["mass"].is_number())
            throw ParseError("malformed", detail::focal_field(i, "mass") + " is not a number");
        const double mass = entry["mass"].get<double>();
        if (!(mass > 0.0))
            throw ParseError("bad-mass", detail::focal_field(i, "mass") + " = " +
                                             std::to_string(mass) + " must be positive");
        if (focal.count(mask))
            throw ParseError("duplicate-set", detail::focal_field(i, "set") + " repeats " +
                                                  frame.describe(mask));
        focal.emplace(mask, mass);
        sum += mass;
    }
    if (std::abs(sum - 1.0) > kMassTol) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", sum);
        throw ParseError("sum-deviation",
                         std::string("masses sum to ") + buf + ", expected 1");
    }
    return MassFunction(std::move(frame), std::move(focal));
}

// Canonical single-line form: frame in original order, focal sets sorted by
// bitmask, masses with 17 significant digits so parse(emit(m)) == m.
inline std::string emit_bpa(const MassFunction& m) {
    std::string out = "{\"frame\":[";
    const Frame& frame = m.frame();
    for (int i = 0; i < frame.size(); ++i) {
        if (i) out += ",";
        out += nlohmann::json(frame.label(i)).dump();
    }
    out += "],\"focal\":[";
    bool first = true;
    for (const auto& [set, mass] : m.focal()) {
        if (!first) out += ",";
        first = false;
        out += "{\"set\":[";
        bool inner = true;
        for (int x = 0; x < frame.size(); ++x)
            if (set & singleton_mask(x)) {
                if (!inner) out += ",";
                inner = false;
                out += nlohmann::json(frame.label(x)).dump();
            }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", mass);
        out += "],\"mass\":";
        out += buf;
        out += "}";
    }
    out += "]}";
    return out;
}

} // namespace dst
