// SPDX-License-Identifier: Apache-2.0
//
// blindmap: blind radio mapping from MIMO-OFDM channel measurements
// Copyright (C) 2026 The blindmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BLINDMAP_LOG_HPP
#define BLINDMAP_LOG_HPP

#include <functional>
#include <string>
#include <string_view>

namespace blindmap
{
    enum class LogLevel
    {
        debug = 0,
        info = 1,
        warning = 2,
        silent = 3
    };

    using LogSink = std::function<void(LogLevel, std::string_view)>;

    // Process-wide diagnostics. The default sink writes warnings to std::clog.
    void set_log_level(LogLevel level);
    LogLevel log_level();
    void set_log_sink(LogSink sink);
    void log_message(LogLevel level, std::string_view message);

    inline void log_warning(std::string_view message) { log_message(LogLevel::warning, message); }
    inline void log_info(std::string_view message) { log_message(LogLevel::info, message); }

} // namespace blindmap

#endif
