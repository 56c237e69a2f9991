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

#include "blindmap/log.hpp"

#include <iostream>
#include <mutex>

namespace blindmap
{
    namespace
    {
        std::mutex g_mutex;
        LogLevel g_level = LogLevel::warning;
        LogSink g_sink;

        const char *level_name(LogLevel level)
        {
            switch (level)
            {
            case LogLevel::debug:
                return "debug";
            case LogLevel::info:
                return "info";
            case LogLevel::warning:
                return "warning";
            default:
                return "";
            }
        }
    } // namespace

    void set_log_level(LogLevel level)
    {
        std::lock_guard lock(g_mutex);
        g_level = level;
    }

    LogLevel log_level()
    {
        std::lock_guard lock(g_mutex);
        return g_level;
    }

    void set_log_sink(LogSink sink)
    {
        std::lock_guard lock(g_mutex);
        g_sink = std::move(sink);
    }

    void log_message(LogLevel level, std::string_view message)
    {
        std::lock_guard lock(g_mutex);
        if (level < g_level || g_level == LogLevel::silent)
            return;
        if (g_sink)
            g_sink(level, message);
        else
            std::clog << "[blindmap " << level_name(level) << "] " << message << '\n';
    }

} // namespace blindmap
