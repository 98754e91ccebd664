// Copyright 2026 The versekit Authors
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

// Project headers first: httplib pulls in resolv.h, whose `_res` macro
// breaks Eigen.
#include "versekit/service.hpp"

#include <httplib.h>

namespace versekit::service {

Server::Server(const Api& api, int threads)
    : api_(api), http_(std::make_unique<httplib::Server>()) {
  if (threads < 1) throw Error("server: threads must be >= 1");
  auto n = static_cast<std::size_t>(threads);
  http_->new_task_queue = [n] { return new httplib::ThreadPool(n); };
  http_->set_payload_max_length(1 << 20);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto out = api_.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  http_->Get(".*", handler);
  http_->Post(".*", handler);
  http_->Put(".*", handler);
  http_->Delete(".*", handler);
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    int p = http_->bind_to_any_port(host);
    if (p < 0) throw Error("server: cannot bind " + host);
    return p;
  }
  if (!http_->bind_to_port(host, port)) {
    throw Error("server: cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Server::listen() {
  if (!http_->listen_after_bind()) throw Error("server: listen failed");
}

void Server::stop() {
  if (http_) http_->stop();
}

}  // namespace versekit::service
