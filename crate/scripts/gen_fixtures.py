#!/usr/bin/env python3
"""Regenerates crates/core/fixtures. Deterministic: same output every run."""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def p(name, ty, desc, required=True, enum=None, minimum=None, maximum=None, **extra):
    return dict(name=name, type=ty, desc=desc, required=required, enum=enum,
                minimum=minimum, maximum=maximum, extra=extra)


def tool(name, desc, *params):
    return dict(name=name, desc=desc, params=list(params))


def schema(t):
    props, req = {}, []
    for q in t["params"]:
        s = {"type": q["type"], "description": q["desc"]}
        if q["enum"] is not None:
            s["enum"] = q["enum"]
        if q["minimum"] is not None:
            s["minimum"] = q["minimum"]
        if q["maximum"] is not None:
            s["maximum"] = q["maximum"]
        s.update(q["extra"])
        props[q["name"]] = s
        if q["required"]:
            req.append(q["name"])
    return {"type": "object", "properties": props, "required": req}


def render(tools, dialect, envelope=None):
    key = {"openai-fc": "parameters", "anthropic-tool-use": "input_schema", "mcp": "inputSchema"}[dialect]
    items = [{"name": t["name"], "description": t["desc"], key: schema(t)} for t in tools]
    if envelope == "openai-wrapped":
        return {"tools": [{"type": "function", "function": i} for i in items]}
    if envelope == "jsonrpc":
        return {"jsonrpc": "2.0", "id": 1, "result": {"tools": items}}
    if dialect == "mcp":
        return {"tools": items}
    return items


def write(name, dialect, doc, compact=False):
    path = OUT / f"{name}.{dialect}.json"
    if compact:
        text = json.dumps(doc, ensure_ascii=False)
    else:
        text = json.dumps(doc, indent=2, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


DOMAINS = {
    "weather": [
        tool("get_current_weather",
             "This tool allows you to get the current weather for a given location. The temperature unit corresponds to the unit parameter.",
             p("location", "string", "The city and state, e.g. San Francisco, CA"),
             p("unit", "string", "The unit of temperature to return", required=False, enum=["celsius", "fahrenheit"])),
        tool("get_forecast",
             "Please note that this returns a daily forecast. Returns the following fields: date, high, low and conditions.",
             p("location", "string", "The city and state"),
             p("days", "integer", "Number of days to forecast", minimum=1, maximum=14)),
        tool("get_air_quality",
             "Basically retrieves the air quality index for a location.",
             p("location", "string", "The city and state"),
             p("pollutant", "string", "Optional pollutant to report", required=False, enum=["pm25", "pm10", "o3", "no2"])),
    ],
    "calendar": [
        tool("list_events",
             "Lists calendar events in a time range. Results are sorted by start time.",
             p("start", "string", "ISO 8601 start of the range"),
             p("end", "string", "ISO 8601 end of the range"),
             p("max_results", "integer", "A maximum of this many events is returned", required=False, minimum=1, maximum=250)),
        tool("create_event",
             "This function is used to create a new calendar event. The attendee list is converted to invitations.",
             p("title", "string", "Event title"),
             p("start", "string", "ISO 8601 start time"),
             p("duration_minutes", "integer", "Length of the event in minutes", minimum=5),
             p("attendees", "array", "Email addresses of attendees", required=False, items={"type": "string"})),
        tool("delete_event",
             "Deletes an event. Please be aware that this cannot be undone.",
             p("event_id", "string", "Identifier of the event to delete")),
        tool("find_free_slot",
             "Finds the first free slot of the requested length, as well as alternatives.",
             p("duration_minutes", "integer", "Required slot length", minimum=5, maximum=480),
             p("within_days", "integer", "Search horizon in days", required=False)),
    ],
    "git": [
        tool("git_status",
             "Shows the working tree status of the repository.",
             p("repo_path", "string", "Path to the repository")),
        tool("git_diff",
             "Shows changes between commits. In order to diff staged changes, set staged to true.",
             p("repo_path", "string", "Path to the repository"),
             p("staged", "boolean", "Whether to show staged changes", required=False),
             p("target", "string", "Commit or branch to compare against", required=False)),
        tool("git_commit",
             "Records changes to the repository. Runs after git_add; the message is used as is.",
             p("repo_path", "string", "Path to the repository"),
             p("message", "string", "Commit message")),
        tool("git_add",
             "Adds file contents to the index.",
             p("repo_path", "string", "Path to the repository"),
             p("files", "array", "Files to stage", items={"type": "string"})),
        tool("git_log",
             "Shows the commit logs. Output is equivalent to git log --oneline.",
             p("repo_path", "string", "Path to the repository"),
             p("max_count", "integer", "Maximum number of commits", required=False, minimum=1, maximum=1000)),
    ],
    "db": [
        tool("run_query",
             "Executes a read-only SQL query and returns rows. Note that writes are rejected.",
             p("sql", "string", "The SQL statement to execute"),
             p("timeout_ms", "integer", "Query timeout in milliseconds", required=False, minimum=100, maximum=60000)),
        tool("list_tables",
             "Lists all tables in the given schema.",
             p("schema", "string", "Schema name", required=False)),
        tool("describe_table",
             "Returns the following items: column names, types and constraints for a table.",
             p("table", "string", "Table name"),
             p("format", "string", "Output format", required=False, enum=["text", "json", "markdown"])),
    ],
    "email": [
        tool("send_email",
             "Sends an email message on behalf of the user. You should always confirm the recipient first.",
             p("to", "string", "Recipient address"),
             p("subject", "string", "Subject line"),
             p("body", "string", "Plain text body"),
             p("priority", "string", "Message priority", required=False, enum=["low", "normal", "high"])),
        tool("search_inbox",
             "Searches the inbox. The query is mapped to the provider search syntax.",
             p("query", "string", "Search query"),
             p("limit", "integer", "Maximum results", required=False, minimum=1, maximum=100)),
        tool("get_message",
             "Fetches a single message by id, as well as its attachments metadata.",
             p("message_id", "string", "Message identifier")),
        tool("archive_message",
             "Archives a message. Requires get_message to have been called for the id.",
             p("message_id", "string", "Message identifier")),
    ],
}

VERBS = ["get", "list", "create", "update", "delete", "search", "sync", "export", "import", "validate"]
NOUNS = ["user", "order", "invoice", "ticket", "project", "report", "file", "comment", "team", "webhook",
         "payment", "product", "review", "session", "alert", "metric", "dashboard", "label", "branch", "release"]
PHRASES = [
    "This tool allows you to {v} a {n} record in the workspace.",
    "Use this tool to {v} {n} entries. Please note that results are paginated.",
    "{V}s the {n} identified by its id. The status field corresponds to the lifecycle state.",
    "{V} one or more {n} objects. Returns the following fields: id, name, created_at.",
    "Basically {v}s a {n} and returns the updated object, as well as an audit entry.",
    "{V}s {n} data for the current account. It is important to note that deleted items are excluded.",
]
PARAM_POOL = [
    ("id", "string", "Unique identifier of the {n}"),
    ("name", "string", "Human readable name of the {n}"),
    ("limit", "integer", "Maximum number of results to return"),
    ("offset", "integer", "Number of results to skip"),
    ("include_archived", "boolean", "Whether archived items are included"),
    ("tags", "array", "Tags used to filter the results"),
    ("sort", "string", "Sort order for the results"),
    ("metadata", "object", "Arbitrary key/value metadata"),
    ("threshold", "number", "Score threshold between 0 and 1"),
]


def synthetic(n, seed):
    rng = random.Random(seed)
    tools, used = [], set()
    while len(tools) < n:
        v, noun = rng.choice(VERBS), rng.choice(NOUNS)
        name = f"{v}_{noun}"
        if name in used:
            name = f"{name}_{len(tools)}"
        used.add(name)
        desc = rng.choice(PHRASES).format(v=v, V=v.capitalize(), n=noun)
        params = []
        for pname, ty, pdesc in rng.sample(PARAM_POOL, rng.randint(1, 4)):
            kw = {}
            if pname == "limit":
                kw = dict(minimum=1, maximum=rng.choice([50, 100, 500]))
            if pname == "threshold":
                kw = dict(minimum=0, maximum=1)
            if pname == "sort":
                kw = dict(enum=["asc", "desc"])
            if ty == "array":
                kw["items"] = {"type": "string"}
            params.append(p(pname, ty, pdesc.format(n=noun), required=rng.random() < 0.5, **kw))
        tools.append(tool(name, desc, *params))
    return tools


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()

    fig2 = {"name": "search_files", "description": "Search project files by content or filename pattern",
            "parameters": {"type": "object", "properties": {
                "query": {"type": "string", "description": "The search query string"},
                "path": {"type": "string", "description": "Optional directory path to search in"}}}}
    write("fig2_search_files", "openai-fc", fig2, compact=True)

    for name, tools in DOMAINS.items():
        for dialect in ["openai-fc", "anthropic-tool-use", "mcp"]:
            write(name, dialect, render(tools, dialect))

    write("synthetic_16", "openai-fc", render(synthetic(16, 16), "openai-fc"))
    write("synthetic_43", "mcp", render(synthetic(43, 43), "mcp"))
    write("synthetic_100", "openai-fc", render(synthetic(100, 100), "openai-fc"))

    devtools = [
        tool("read_file", "Reads a file from disk. The path is resolved relative to the project root.",
             p("path", "string", "File path"),
             p("encoding", "string", "Text encoding", required=False, enum=["utf-8", "latin-1"])),
        tool("write_file", "Writes content to a file. Please make sure the directory exists.",
             p("path", "string", "File path"), p("content", "string", "Full file content")),
        tool("run_tests", "Runs the test suite and reports failures. Runs after write_file.",
             p("pattern", "string", "Optional test name filter", required=False),
             p("timeout_s", "integer", "Timeout in seconds", required=False, minimum=1, maximum=3600)),
    ]
    write("anthropic_devtools", "anthropic-tool-use", render(devtools, "anthropic-tool-use"))

    fs = [
        tool("list_directory", "Get a detailed listing of all files and directories in a specified path.",
             p("path", "string", "Directory to list")),
        tool("move_file", "Move or rename files and directories. Note that the destination must not exist.",
             p("source", "string", "Source path"), p("destination", "string", "Destination path")),
        tool("get_file_info", "Retrieve detailed metadata about a file or directory, as well as permissions.",
             p("path", "string", "Target path")),
    ]
    write("mcp_filesystem", "mcp", render(fs, "mcp", envelope="jsonrpc"))
    write("openai_wrapped", "openai-fc", render(DOMAINS["weather"][:2], "openai-fc", envelope="openai-wrapped"))

    pipeline = [
        tool("deploy", "Deploys the built artifact. Runs after build and requires test.",
             p("env", "string", "Target environment", enum=["staging", "production"])),
        tool("test", "Runs the test suite. Requires build.", p("suite", "string", "Suite name", required=False)),
        tool("build", "Compiles the project.", p("release", "boolean", "Optimized build", required=False)),
        tool("notify", "Sends a notification to the team channel.", p("message", "string", "Text to send")),
    ]
    write("deps_pipeline", "mcp", render(pipeline, "mcp"))

    nested = [{
        "name": "configure_service",
        "description": "Updates the service configuration. Changes take effect on the next restart.",
        "parameters": {
            "type": "object",
            "properties": {
                "service": {"type": "string", "description": "Service name"},
                "limits": {
                    "type": "object",
                    "description": "Resource limits",
                    "properties": {
                        "cpu": {"type": "number", "minimum": 0.1, "maximum": 64},
                        "memory_mb": {"type": "integer", "minimum": 64},
                    },
                    "required": ["cpu"],
                },
                "log_level": {"type": "string", "enum": ["debug", "info", "warn", "error"]},
                "replicas": {"anyOf": [{"type": "integer"}, {"type": "null"}], "description": "Optional replica count"},
            },
            "required": ["service", "limits"],
        },
    }]
    write("nested_config", "openai-fc", nested)


if __name__ == "__main__":
    main()
