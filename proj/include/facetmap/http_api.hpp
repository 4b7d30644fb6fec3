// Copyright 2026 The Facetmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP+JSON front end of MapService.
//
//   POST   /maps                              {title,bbox,snapshot_id[,layout]}
//   GET    /maps/{id}
//   PATCH  /maps/{id}                         {layout}
//   GET    /categories?prefix=
//   GET    /snapshots
//   POST   /maps/{id}/categories              {category_id}
//   DELETE /maps/{id}/categories/{category_id}
//   GET    /maps/{id}/widgets/{category_id}
//   PATCH  /maps/{id}/projection              {category_id,opacity?,hidden?,toggles?,revision?}
//   GET    /maps/{id}/items
//   GET    /maps/{id}/items/{item_id}
//   POST   /maps/{id}/count                   {category_id,polygon:[[lon,lat],...]}
//
// Status codes: 404 unknown resource, 400 invalid body, 409 stale revision.

#pragma once

#include <functional>
#include <string>
#include <utility>

#include <httplib.h>

#include "facetmap/map_service.hpp"

namespace facetmap {

class HttpApi {
 public:
  explicit HttpApi(MapService& service) : service_(service) {
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // server share a busy port instead of failing to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    routes();
  }

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  using Handler = std::function<json(const httplib::Request&)>;

  static void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), "application/json");
  }

  // Runs `handler` and maps library errors onto status codes.
  static httplib::Server::Handler wrap(Handler handler, int success_status = 200) {
    return [handler = std::move(handler), success_status](const httplib::Request& req,
                                                          httplib::Response& res) {
      try {
        auto body = handler(req);
        res.status = success_status;
        res.set_content(body.dump(), "application/json");
      } catch (const NotFoundError& e) {
        reply_error(res, 404, e.what());
      } catch (const ConflictError& e) {
        reply_error(res, 409, e.what());
      } catch (const InvalidArgument& e) {
        reply_error(res, 400, e.what());
      } catch (const FormatError& e) {
        reply_error(res, 400, e.what());
      } catch (const ParseError& e) {
        reply_error(res, 400, e.what());
      } catch (const json::exception& e) {
        reply_error(res, 400, e.what());
      } catch (const std::exception& e) {
        reply_error(res, 500, e.what());
      }
    };
  }

  static json body_of(const httplib::Request& req) {
    try {
      auto j = json::parse(req.body);
      if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
      return j;
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("malformed JSON body: ") + e.what());
    }
  }

  static Polygon polygon_of(const json& coords) {
    try {
      return polygon_from_json(coords);
    } catch (const FormatError& e) {
      throw InvalidArgument(e.what());
    }
  }

  void routes() {
    auto& s = service_;

    server_.Post("/maps", wrap(
                              [&s](const httplib::Request& req) {
                                auto b = body_of(req);
                                auto layout = parse_layout(b.value("layout", "checkboxes"));
                                BoundingBox bbox;
                                try {
                                  bbox = bbox_from_json(b.at("bbox"));
                                } catch (const FormatError& e) {
                                  throw InvalidArgument(e.what());
                                }
                                return to_json(s.create_map(b.value("title", std::string{}), bbox,
                                                            b.at("snapshot_id").get<std::string>(),
                                                            layout));
                              },
                              201));

    server_.Get(R"(/maps/([^/]+))", wrap([&s](const httplib::Request& req) {
                  return to_json(s.get_map(req.matches[1]));
                }));

    server_.Patch(R"(/maps/([^/]+))", wrap([&s](const httplib::Request& req) {
                    auto b = body_of(req);
                    return to_json(
                        s.set_layout(req.matches[1], parse_layout(b.at("layout").get<std::string>())));
                  }));

    server_.Get("/categories", wrap([&s](const httplib::Request& req) {
                  json out = json::array();
                  for (const auto& c : s.categories(req.get_param_value("prefix")))
                    out.push_back(category_to_json(c));
                  return out;
                }));

    server_.Get("/snapshots", wrap([&s](const httplib::Request&) {
                  return json(s.snapshot_ids());
                }));

    server_.Post(R"(/maps/([^/]+)/categories)", wrap([&s](const httplib::Request& req) {
                   auto b = body_of(req);
                   return to_json(
                       s.search_category(req.matches[1], b.at("category_id").get<std::string>()));
                 }));

    server_.Delete(R"(/maps/([^/]+)/categories/([^/]+))", wrap([&s](const httplib::Request& req) {
                     return to_json(s.remove_category(req.matches[1], req.matches[2]));
                   }));

    server_.Get(R"(/maps/([^/]+)/widgets/([^/]+))", wrap([&s](const httplib::Request& req) {
                  return to_json(s.widget(req.matches[1], req.matches[2]));
                }));

    server_.Patch(R"(/maps/([^/]+)/projection)", wrap([&s](const httplib::Request& req) {
                    return to_json(
                        s.update_projection(req.matches[1], projection_patch_from_json(body_of(req))));
                  }));

    server_.Get(R"(/maps/([^/]+)/items)", wrap([&s](const httplib::Request& req) {
                  json out = json::array();
                  for (const auto& r : s.visible_items(req.matches[1])) out.push_back(to_json(r));
                  return out;
                }));

    // Item ids contain a slash ("node/42"); the path is already percent-decoded.
    server_.Get(R"(/maps/([^/]+)/items/(.+))", wrap([&s](const httplib::Request& req) {
                  return to_json(s.item_details(req.matches[1], req.matches[2]));
                }));

    server_.Post(R"(/maps/([^/]+)/count)", wrap([&s](const httplib::Request& req) {
                   auto b = body_of(req);
                   auto n = s.count_items(req.matches[1], b.at("category_id").get<std::string>(),
                                          polygon_of(b.at("polygon")));
                   return json{{"count", n}};
                 }));
  }

  MapService& service_;
  httplib::Server server_;
};

}  // namespace facetmap
