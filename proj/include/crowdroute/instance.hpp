#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crowdroute/errors.hpp"

namespace crowdroute {

/// Planar location in miles.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Request {
    int id = 0;
    Point pickup;
    Point delivery;
    double earliest_pickup = 0.0;   // minutes
    double latest_delivery = 0.0;   // minutes
    double weight = 0.0;            // lbs

    friend bool operator==(const Request&, const Request&) = default;
};

/// An ad hoc courier. Availability is [t_start, t_end] in minutes.
struct Crowdsourcee {
    int id = 0;
    Point origin;
    double t_start = 0.0;
    double t_end = 0.0;
    double capacity = 0.0;  // lbs
    double speed = 0.0;     // mph

    double available_time() const { return t_end - t_start; }

    friend bool operator==(const Crowdsourcee&, const Crowdsourcee&) = default;
};

/// The immutable scenario. Costs are in $/minute, speeds in mph.
struct ProblemInstance {
    std::vector<Request> requests;
    std::vector<Crowdsourcee> crowdsourcees;
    Point depot;
    double backup_speed = 20.0;
    double beta_c = 10.0 / 60.0;
    double beta_b = 1.13;
    double area_side = 6.0;

    int num_requests() const { return static_cast<int>(requests.size()); }
    int num_crowdsourcees() const { return static_cast<int>(crowdsourcees.size()); }

    /// Speed used for crowdsourcee-side direct travel estimates (slack time).
    double courier_speed() const {
        double speed = 0.0;
        for (const auto& c : crowdsourcees) speed = std::max(speed, c.speed);
        return speed > 0.0 ? speed : backup_speed;
    }

    friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Euclidean travel time in minutes at `speed` mph.
inline double travel_time(Point a, Point b, double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("travel_time: speed must be positive");
    return distance(a, b) / speed * 60.0;
}

/// Backup-vehicle round trip depot -> pickup -> delivery -> depot, in minutes.
inline double backup_round_trip(const ProblemInstance& inst, const Request& r) {
    return travel_time(inst.depot, r.pickup, inst.backup_speed) +
           travel_time(r.pickup, r.delivery, inst.backup_speed) +
           travel_time(r.delivery, inst.depot, inst.backup_speed);
}

/// Throws ValidationError when an invariant of the scenario is broken.
inline void validate(const ProblemInstance& inst) {
    auto inside = [&](Point p) {
        return p.x >= 0.0 && p.y >= 0.0 && p.x <= inst.area_side && p.y <= inst.area_side;
    };
    if (!(inst.area_side > 0.0)) throw ValidationError("area_side must be positive");
    if (!inside(inst.depot)) throw ValidationError("depot lies outside the service area");
    if (!(inst.beta_c > 0.0)) throw ValidationError("beta_c must be positive");
    if (!(inst.beta_b > inst.beta_c)) throw ValidationError("beta_b must exceed beta_c");
    if (!(inst.backup_speed > 0.0)) throw ValidationError("backup_speed must be positive");
    for (std::size_t j = 0; j < inst.requests.size(); ++j) {
        const auto& r = inst.requests[j];
        if (r.id != static_cast<int>(j)) throw ValidationError("request ids must be 0..n-1 in order");
        if (!inside(r.pickup) || !inside(r.delivery))
            throw ValidationError("request " + std::to_string(j) + " lies outside the service area");
        if (!(r.earliest_pickup < r.latest_delivery))
            throw ValidationError("request " + std::to_string(j) + ": earliest_pickup >= latest_delivery");
        if (!(r.weight > 0.0)) throw ValidationError("request " + std::to_string(j) + ": weight must be positive");
    }
    for (std::size_t k = 0; k < inst.crowdsourcees.size(); ++k) {
        const auto& c = inst.crowdsourcees[k];
        if (c.id != static_cast<int>(k)) throw ValidationError("crowdsourcee ids must be 0..n-1 in order");
        if (!inside(c.origin))
            throw ValidationError("crowdsourcee " + std::to_string(k) + " lies outside the service area");
        if (!(c.t_start < c.t_end)) throw ValidationError("crowdsourcee " + std::to_string(k) + ": t_start >= t_end");
        if (!(c.capacity > 0.0)) throw ValidationError("crowdsourcee " + std::to_string(k) + ": capacity must be positive");
        if (!(c.speed > 0.0)) throw ValidationError("crowdsourcee " + std::to_string(k) + ": speed must be positive");
    }
}

/// Distribution parameters for random scenarios. Defaults are the medium-size setup.
struct GeneratorParams {
    double area_side = 6.0;
    double courier_speed = 10.0;
    double courier_capacity = 10.0;
    double availability_min = 60.0;
    double availability_max = 120.0;
    double weight_min = 2.0;
    double weight_max = 7.0;
    double latest_delivery_min = 100.0;
    double latest_delivery_max = 120.0;
    double backup_speed = 20.0;
    double beta_b = 1.13;
    double beta_c = 10.0 / 60.0;
    // Use the rounded $0.17/min crowdsourcee rate instead of exactly $10/hour.
    bool literal_beta_c = false;
};

/// Random scenario, deterministic in `seed`. The depot sits at the centre of the area.
inline ProblemInstance generate_instance(int n_requests, int n_crowdsourcees, std::uint64_t seed,
                                         const GeneratorParams& params = {}) {
    if (n_requests <= 0 || n_crowdsourcees <= 0)
        throw std::invalid_argument("generate_instance: counts must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, params.area_side);
    std::uniform_real_distribution<double> weight(params.weight_min, params.weight_max);
    std::uniform_real_distribution<double> latest(params.latest_delivery_min, params.latest_delivery_max);
    std::uniform_real_distribution<double> availability(params.availability_min, params.availability_max);

    ProblemInstance inst;
    inst.area_side = params.area_side;
    inst.depot = {params.area_side / 2.0, params.area_side / 2.0};
    inst.backup_speed = params.backup_speed;
    inst.beta_b = params.beta_b;
    inst.beta_c = params.literal_beta_c ? 0.17 : params.beta_c;

    inst.requests.reserve(n_requests);
    for (int j = 0; j < n_requests; ++j) {
        Request r;
        r.id = j;
        r.pickup = {coord(rng), coord(rng)};
        r.delivery = {coord(rng), coord(rng)};
        r.weight = weight(rng);
        r.earliest_pickup = 0.0;
        r.latest_delivery = latest(rng);
        inst.requests.push_back(r);
    }
    inst.crowdsourcees.reserve(n_crowdsourcees);
    for (int k = 0; k < n_crowdsourcees; ++k) {
        Crowdsourcee c;
        c.id = k;
        c.origin = {coord(rng), coord(rng)};
        c.t_start = 0.0;
        c.t_end = availability(rng);
        c.capacity = params.courier_capacity;
        c.speed = params.courier_speed;
        inst.crowdsourcees.push_back(c);
    }
    return inst;
}

// --- serialization -------------------------------------------------------

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const std::string& key,
                                     const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError(key, "missing field '" + key + "' in " + path);
    return obj.at(key);
}

inline double require_number(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number()) throw ParseError(key, "field '" + key + "' in " + path + " is not a number");
    return v.get<double>();
}

inline int require_int(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number_integer()) throw ParseError(key, "field '" + key + "' in " + path + " is not an integer");
    return v.get<int>();
}

inline Point require_point(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    const std::string sub = path + "." + key;
    return {require_number(v, "x", sub), require_number(v, "y", sub)};
}

inline nlohmann::json to_json(Point p) { return {{"x", p.x}, {"y", p.y}}; }

}  // namespace detail

inline nlohmann::json to_json(const ProblemInstance& inst) {
    using detail::to_json;
    nlohmann::json doc;
    doc["area_side"] = inst.area_side;
    doc["depot"] = to_json(inst.depot);
    doc["backup_speed"] = inst.backup_speed;
    doc["beta_c"] = inst.beta_c;
    doc["beta_b"] = inst.beta_b;
    auto& requests = doc["requests"] = nlohmann::json::array();
    for (const auto& r : inst.requests) {
        requests.push_back({{"id", r.id},
                            {"pickup", to_json(r.pickup)},
                            {"delivery", to_json(r.delivery)},
                            {"earliest_pickup", r.earliest_pickup},
                            {"latest_delivery", r.latest_delivery},
                            {"weight", r.weight}});
    }
    auto& couriers = doc["crowdsourcees"] = nlohmann::json::array();
    for (const auto& c : inst.crowdsourcees) {
        couriers.push_back({{"id", c.id},
                            {"origin", to_json(c.origin)},
                            {"t_start", c.t_start},
                            {"t_end", c.t_end},
                            {"capacity", c.capacity},
                            {"speed", c.speed}});
    }
    return doc;
}

/// Parses and validates. Missing or mistyped keys raise ParseError naming the key.
inline ProblemInstance instance_from_json(const nlohmann::json& doc) {
    using namespace detail;
    ProblemInstance inst;
    inst.area_side = require_number(doc, "area_side", "instance");
    inst.depot = require_point(doc, "depot", "instance");
    inst.backup_speed = require_number(doc, "backup_speed", "instance");
    inst.beta_c = require_number(doc, "beta_c", "instance");
    inst.beta_b = require_number(doc, "beta_b", "instance");

    const auto& requests = require(doc, "requests", "instance");
    if (!requests.is_array()) throw ParseError("requests", "field 'requests' is not an array");
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const std::string path = "requests[" + std::to_string(i) + "]";
        const auto& r = requests[i];
        inst.requests.push_back({require_int(r, "id", path), require_point(r, "pickup", path),
                                 require_point(r, "delivery", path), require_number(r, "earliest_pickup", path),
                                 require_number(r, "latest_delivery", path), require_number(r, "weight", path)});
    }
    const auto& couriers = require(doc, "crowdsourcees", "instance");
    if (!couriers.is_array()) throw ParseError("crowdsourcees", "field 'crowdsourcees' is not an array");
    for (std::size_t i = 0; i < couriers.size(); ++i) {
        const std::string path = "crowdsourcees[" + std::to_string(i) + "]";
        const auto& c = couriers[i];
        inst.crowdsourcees.push_back({require_int(c, "id", path), require_point(c, "origin", path),
                                      require_number(c, "t_start", path), require_number(c, "t_end", path),
                                      require_number(c, "capacity", path), require_number(c, "speed", path)});
    }
    validate(inst);
    return inst;
}

inline void save_instance(const ProblemInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << to_json(inst).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", std::string("malformed instance file: ") + e.what());
    }
    return instance_from_json(doc);
}

}  // namespace crowdroute
