use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Infeasible,
    NotRecognized,
    Blocked,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
            Status::NotRecognized => "not-recognized",
            Status::Blocked => "blocked",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        if self == Status::Error {
            1
        } else {
            0
        }
    }
}

/// Outcome of one invocation. Payload keys keep insertion order in text mode.
#[derive(Debug)]
pub struct CommandResult {
    pub status: Status,
    payload: Vec<(String, Value)>,
    diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn new(status: Status) -> Self {
        CommandResult {
            status,
            payload: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn ok() -> Self {
        Self::new(Status::Ok)
    }

    pub fn error(msg: impl Into<String>) -> Self {
        let mut r = Self::new(Status::Error);
        r.diagnostics.push(msg.into());
        r
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn put(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.payload.push((key.to_string(), value.into()));
        self
    }

    pub fn note(mut self, msg: impl Into<String>) -> Self {
        self.diagnostics.push(msg.into());
        self
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("status: {}\n", self.status.as_str());
        for (k, v) in &self.payload {
            match v {
                Value::Array(items) if items.iter().all(Value::is_string) => {
                    out.push_str(&format!("{k}:\n"));
                    for item in items {
                        out.push_str(&format!("  {}\n", item.as_str().unwrap()));
                    }
                }
                Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                other => out.push_str(&format!("{k}: {other}\n")),
            }
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let payload: Map<String, Value> = self.payload.iter().cloned().collect();
        let doc = serde_json::json!({
            "status": self.status.as_str(),
            "payload": payload,
            "diagnostics": self.diagnostics,
        });
        serde_json::to_string_pretty(&doc).unwrap() + "\n"
    }
}
