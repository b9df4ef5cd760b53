//
// Copyright 2026 The Nanoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <string>

#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "nanoscope/api.h"

namespace nanoscope {

absl::Status Serve(ApiService& service, const ServeOptions& options) {
  httplib::Server server;

  auto cors = [&service](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    if (service.OriginAllowed(origin)) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
  };
  auto dispatch = [&service, cors](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    ApiResponse out = service.Handle(req.method, req.path, query, req.body);
    cors(req, res);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };

  server.Get(R"(/api/.*)", dispatch);
  server.Post(R"(/api/.*)", dispatch);
  server.Options(R"(/api/.*)", [cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    res.status = 204;
  });
  if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir)) {
    return absl::NotFoundError(absl::StrCat("static directory ", options.static_dir,
                                            " does not exist"));
  }
  if (!server.listen(options.host, options.port)) {
    return absl::UnavailableError(
        absl::StrCat("cannot listen on ", options.host, ":", options.port));
  }
  return absl::OkStatus();
}

}  // namespace nanoscope
