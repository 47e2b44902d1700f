#pragma once

// internal JSON converters for the domain/field spec variants, shared by the
// grid sidecar IO and the experiment config loader

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "infobs/geometry.hpp"

namespace infobs::detail {

using nlohmann::json;

inline json domain_to_json(const DomainSpec& dom) {
    json j;
    if (const auto* d = std::get_if<Disk>(&dom)) {
        j["shape"] = "disk";
        j["center"] = {d->center.x, d->center.y};
        j["radius"] = d->radius;
    } else if (const auto* b = std::get_if<Box>(&dom)) {
        j["shape"] = "box";
        j["lo"] = {b->lo.x, b->lo.y};
        j["hi"] = {b->hi.x, b->hi.y};
    } else {
        const auto& db = std::get<Dumbbell>(dom);
        j["shape"] = "dumbbell";
        j["ball_radius"] = db.ball_radius;
        j["tube_halfwidth"] = db.tube_halfwidth;
        j["separation"] = db.separation;
    }
    return j;
}

inline DomainSpec domain_from_json(const json& j) {
    const std::string shape = j.at("shape");
    if (shape == "disk")
        return Disk{{j.at("center")[0], j.at("center")[1]}, j.at("radius")};
    if (shape == "box")
        return Box{{j.at("lo")[0], j.at("lo")[1]}, {j.at("hi")[0], j.at("hi")[1]}};
    if (shape == "dumbbell")
        return Dumbbell{j.at("ball_radius"), j.at("tube_halfwidth"), j.at("separation")};
    throw std::invalid_argument("unknown domain shape: " + shape);
}

inline json analytic_to_json(const AnalyticSpec& f) {
    json j;
    if (const auto* cap = std::get_if<SphericalCap>(&f)) {
        j["kind"] = "spherical_cap";
        j["center"] = {cap->center.x, cap->center.y};
        j["height"] = cap->height;
    } else if (std::get_if<AronssonFn>(&f)) {
        j["kind"] = "aronsson";
    } else if (const auto* k = std::get_if<ConstantFn>(&f)) {
        j["kind"] = "constant";
        j["value"] = k->value;
    } else if (const auto* a = std::get_if<AffineFn>(&f)) {
        j["kind"] = "affine";
        j["slope"] = {a->slope.x, a->slope.y};
        j["offset"] = a->offset;
    } else if (const auto* b = std::get_if<BarrierFn>(&f)) {
        j["kind"] = "barrier";
        j["nu"] = b->nu;
        j["center"] = {b->center.x, b->center.y};
    } else {
        j["kind"] = "table";
        j["values"] = std::get<CustomTable>(f).values;
    }
    return j;
}

inline AnalyticSpec analytic_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "spherical_cap")
        return SphericalCap{{j.at("center")[0], j.at("center")[1]}, j.at("height")};
    if (kind == "aronsson") return AronssonFn{};
    if (kind == "constant") return ConstantFn{j.at("value")};
    if (kind == "affine")
        return AffineFn{{j.at("slope")[0], j.at("slope")[1]}, j.at("offset")};
    if (kind == "barrier")
        return BarrierFn{j.at("nu"), {j.at("center")[0], j.at("center")[1]}};
    if (kind == "table") return CustomTable{j.at("values").get<std::vector<double>>()};
    throw std::invalid_argument("unknown field kind: " + kind);
}

}  // namespace infobs::detail
