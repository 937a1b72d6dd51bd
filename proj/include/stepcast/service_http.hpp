#pragma once

// cpp-httplib binding of the what-if handlers. Needs pthreads at link time.

#include <memory>
#include <optional>
#include <string>

#include <httplib.h>

#include "stepcast/service.hpp"

namespace stepcast::service {

inline void reply(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

/// Routes GET /health, GET /ensemble?h=, POST /whatif onto `svc`, which must
/// outlive the server.
inline std::unique_ptr<httplib::Server> make_server(const WhatIfService& svc) {
    auto server = std::make_unique<httplib::Server>();
    server->Get("/health", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.health()); });
    server->Get("/ensemble", [&svc](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> h;
        if (req.has_param("h")) h = req.get_param_value("h");
        reply(res, svc.ensemble(h));
    });
    server->Post("/whatif", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.whatif(req.body));
    });
    // Let a browser console on another origin call the API.
    server->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    return server;
}

}  // namespace stepcast::service
