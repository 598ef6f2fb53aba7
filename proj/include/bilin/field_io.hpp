#pragma once

// JSON (de)serialization for fields.
//
// Schema:
//   { "n": int,
//     "points": [ { "label": str?, "weight": float,
//                   "matrix": [[float,...],...] } ],
//     "kind": "bilinear" | "tangent" }
//
// Matrices are row-major. Doubles are written with 17 significant digits,
// so save -> load reproduces every entry bit-exactly.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bilin/errors.hpp"
#include "bilin/fields.hpp"

namespace bilin {

enum class FieldKind { Bilinear, Tangent };

struct LoadedField {
    FieldKind kind;
    Mesh mesh;
    std::vector<FiberMatrix> matrices;
    int n = 0;

    BilinearField as_bilinear() const {
        if (kind != FieldKind::Bilinear)
            throw ValidationError("field is not a bilinear structure");
        return BilinearField(mesh, matrices);
    }
    TangentField as_tangent() const { return TangentField(mesh, matrices); }
};

namespace detail {

inline nlohmann::json field_to_json(const Mesh& mesh,
                                    const std::vector<FiberMatrix>& mats,
                                    int n, FieldKind kind) {
    nlohmann::json j;
    j["n"] = n;
    j["kind"] = kind == FieldKind::Bilinear ? "bilinear" : "tangent";
    j["points"] = nlohmann::json::array();
    for (size_t x = 0; x < mats.size(); ++x) {
        nlohmann::json pt;
        if (!mesh.labels.empty()) pt["label"] = mesh.labels[x];
        pt["weight"] = mesh.weights[x];
        auto rows = nlohmann::json::array();
        for (int i = 0; i < n; ++i) {
            auto row = nlohmann::json::array();
            for (int k = 0; k < n; ++k) row.push_back(mats[x](i, k));
            rows.push_back(row);
        }
        pt["matrix"] = rows;
        j["points"].push_back(pt);
    }
    return j;
}

}  // namespace detail

inline void save_field(const BilinearField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("save_field: cannot open " + path);
    out << detail::field_to_json(f.mesh, f.mats, f.n, FieldKind::Bilinear).dump(2)
        << "\n";
}

inline void save_field(const TangentField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("save_field: cannot open " + path);
    out << detail::field_to_json(f.mesh, f.mats, f.n, FieldKind::Tangent).dump(2)
        << "\n";
}

inline LoadedField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("load_field: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("load_field: ") + e.what());
    }

    LoadedField f;
    try {
        if (!j.contains("n") || !j.contains("points") || !j.contains("kind"))
            throw ParseError("load_field: missing n/points/kind");
        f.n = j.at("n").get<int>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "bilinear")
            f.kind = FieldKind::Bilinear;
        else if (kind == "tangent")
            f.kind = FieldKind::Tangent;
        else
            throw ParseError("load_field: unknown kind '" + kind + "'");

        std::vector<double> weights;
        std::vector<std::string> labels;
        bool any_label = false;
        for (const auto& pt : j.at("points")) {
            weights.push_back(pt.at("weight").get<double>());
            if (pt.contains("label")) {
                any_label = true;
                labels.push_back(pt.at("label").get<std::string>());
            } else {
                labels.push_back("");
            }
            const auto& rows = pt.at("matrix");
            if (!rows.is_array() || static_cast<int>(rows.size()) != f.n)
                throw ShapeError("load_field: matrix is not n rows");
            FiberMatrix m(f.n, f.n);
            for (int i = 0; i < f.n; ++i) {
                if (!rows[i].is_array() ||
                    static_cast<int>(rows[i].size()) != f.n)
                    throw ShapeError("load_field: row length != n");
                for (int k = 0; k < f.n; ++k)
                    m(i, k) = rows[i][k].get<double>();
            }
            f.matrices.push_back(std::move(m));
        }
        f.mesh = Mesh(std::move(weights),
                      any_label ? std::move(labels)
                                : std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("load_field: ") + e.what());
    }

    if (f.n < 1) throw ShapeError("load_field: n must be positive");
    if (f.matrices.empty()) throw ParseError("load_field: no points");
    if (f.kind == FieldKind::Bilinear) {
        for (const auto& m : f.matrices)
            if (!is_invertible(m))
                throw ValidationError("load_field: singular bilinear matrix");
    }
    for (const auto& m : f.matrices)
        if (!m.allFinite())
            throw ValidationError("load_field: non-finite entry");
    return f;
}

}  // namespace bilin
