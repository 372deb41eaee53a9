// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file external_model.cpp
//! \brief Line-protocol adapter for user simulators run as subprocesses
//---------------------------------------------------------------------------//
#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <fcntl.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "shapley/errors.hpp"
#include "shapley/models.hpp"

namespace shapley
{
namespace
{
//---------------------------------------------------------------------------//
class ExternalProcess
{
  public:
    explicit ExternalProcess(std::string command);
    ~ExternalProcess();

    ExternalProcess(ExternalProcess const&) = delete;
    ExternalProcess& operator=(ExternalProcess const&) = delete;

    double evaluate(std::span<double const> x);

  private:
    void write_all(std::string_view data);

    std::string command_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    std::FILE* from_child_ = nullptr;
    std::size_t line_ = 0;
    std::mutex mutex_;
};

ExternalProcess::ExternalProcess(std::string command)
    : command_(std::move(command))
{
    // A dead child must surface as EPIPE, not kill the host
    std::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0)
    {
        throw EvaluationError("cannot create pipe: "
                              + std::string(std::strerror(errno)));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0)
    {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw EvaluationError("cannot create pipe: "
                              + std::string(std::strerror(errno)));
    }

    pid_ = ::fork();
    if (pid_ < 0)
    {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]})
            ::close(fd);
        throw EvaluationError("cannot fork: "
                              + std::string(std::strerror(errno)));
    }
    if (pid_ == 0)
    {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(),
                static_cast<char*>(nullptr));
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = ::fdopen(out_pipe[0], "r");
}

ExternalProcess::~ExternalProcess()
{
    // EOF on stdin tells the process to finish
    if (to_child_ >= 0)
        ::close(to_child_);
    if (from_child_)
        std::fclose(from_child_);
    if (pid_ > 0)
    {
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR)
        {
        }
    }
}

void ExternalProcess::write_all(std::string_view data)
{
    while (!data.empty())
    {
        auto const written = ::write(to_child_, data.data(), data.size());
        if (written < 0)
        {
            if (errno == EINTR)
                continue;
            throw EvaluationError("external model '" + command_
                                      + "' closed its input at line "
                                      + std::to_string(line_),
                                  {}, line_);
        }
        data.remove_prefix(static_cast<std::size_t>(written));
    }
}

double ExternalProcess::evaluate(std::span<double const> x)
{
    std::lock_guard lock(mutex_);
    ++line_;

    std::string request;
    char buf[32];
    for (std::size_t j = 0; j < x.size(); ++j)
    {
        if (j > 0)
            request.push_back(' ');
        auto res = std::to_chars(buf, buf + sizeof(buf), x[j]);
        request.append(buf, res.ptr);
    }
    request.push_back('\n');
    write_all(request);

    char* raw = nullptr;
    std::size_t cap = 0;
    auto const len = ::getline(&raw, &cap, from_child_);
    std::unique_ptr<char, decltype(&std::free)> holder(raw, &std::free);
    if (len < 0)
    {
        throw EvaluationError("external model '" + command_
                                  + "' exited before replying to line "
                                  + std::to_string(line_),
                              {}, line_);
    }

    std::string_view reply(raw, static_cast<std::size_t>(len));
    auto const first = reply.find_first_not_of(" \t\r\n");
    auto const last = reply.find_last_not_of(" \t\r\n");
    if (first == std::string_view::npos)
    {
        throw EvaluationError("external model sent an empty reply at line "
                                  + std::to_string(line_),
                              {}, line_);
    }
    reply = reply.substr(first, last - first + 1);

    double value = 0;
    auto [ptr, ec] = std::from_chars(reply.data(), reply.data() + reply.size(),
                                     value);
    if (ec != std::errc{} || ptr != reply.data() + reply.size())
    {
        throw EvaluationError("external model sent a malformed reply '"
                                  + std::string(reply) + "' at line "
                                  + std::to_string(line_),
                              {}, line_);
    }
    return value;
}
}  // namespace

//---------------------------------------------------------------------------//
ModelFunction make_external_model(std::string const& command, std::size_t dim)
{
    if (command.empty())
    {
        throw ParameterError("external model command is empty");
    }
    if (dim == 0)
    {
        throw ParameterError("model dimension must be at least 1");
    }
    auto process = std::make_shared<ExternalProcess>(command);
    return ModelFunction(
        dim,
        [process](std::span<double const> x) { return process->evaluate(x); },
        /* concurrent = */ false);
}

}  // namespace shapley
