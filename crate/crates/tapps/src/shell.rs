//! The human-facing front end: an interactive prompt loop and a script
//! runner, both feeding the same parse-compile-execute path so a
//! statement sequence behaves identically in either mode.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::bytecode::compile;
use crate::language::{load_script, parse};
use crate::vm::{execute, Environment, Session};

/// Placeholder recorded in the AST history when a statement failed to
/// parse, keeping the two histories index-aligned.
pub const PARSE_ERROR_AST: &str = "<parse error>";

fn is_comment_or_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn is_exit(line: &str) -> bool {
    let t = line.trim();
    t.eq_ignore_ascii_case("exit") || t.eq_ignore_ascii_case("quit")
}

/// Parse, record, and run one statement. Returns false when anything
/// went wrong; errors are printed as one line and never propagate, so
/// the caller just moves on to the next statement.
fn execute_line(
    raw: &str,
    s: &mut Session,
    env: &mut Environment,
    out: &mut impl Write,
    errw: &mut impl Write,
) -> bool {
    let trimmed = raw.trim();
    let stmt = match parse(trimmed) {
        Ok(stmt) => stmt,
        Err(e) => {
            s.record(trimmed, PARSE_ERROR_AST);
            let _ = writeln!(errw, "Error: {e}");
            return false;
        }
    };
    let formatted = stmt.to_string();
    s.record(trimmed, &formatted);
    if env.display_ast {
        let _ = writeln!(out, "{formatted}");
    }
    for b in compile(&stmt) {
        match execute(&b, s, env) {
            Ok(res) => {
                if !res.output.is_empty() {
                    let _ = writeln!(out, "{}", res.output);
                }
            }
            Err(e) => {
                let _ = writeln!(errw, "Error: {e}");
                return false;
            }
        }
    }
    true
}

/// The interactive loop. Prompts count accepted statements; blank lines
/// and comments neither execute nor advance the prompt number. `exit`
/// and `quit` end the session without being recorded. Always exits 0;
/// statement errors are reported inline and the loop continues.
pub fn repl(
    input: &mut impl BufRead,
    out: &mut impl Write,
    errw: &mut impl Write,
    s: &mut Session,
    env: &mut Environment,
) -> i32 {
    loop {
        let _ = write!(out, "TAPPS: {}> ", s.history.len() + 1);
        let _ = out.flush();
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        if is_comment_or_blank(&line) {
            continue;
        }
        if is_exit(&line) {
            break;
        }
        execute_line(&line, s, env, out, errw);
    }
    0
}

/// Run a script file: expand includes up front (any include failure
/// aborts before executing a single statement), then execute in order.
/// Each statement is echoed with its prompt number so script logs read
/// like interactive transcripts. Exits 0 only when every statement
/// parsed and executed cleanly.
pub fn run_script(
    path: &Path,
    out: &mut impl Write,
    errw: &mut impl Write,
    s: &mut Session,
    env: &mut Environment,
) -> i32 {
    let source = match load_script(path) {
        Ok(source) => source,
        Err(e) => {
            let _ = writeln!(errw, "Error: {e}");
            return 1;
        }
    };
    let mut all_ok = true;
    for line in &source.lines {
        if is_comment_or_blank(line) {
            continue;
        }
        if is_exit(line) {
            break;
        }
        let _ = writeln!(out, "TAPPS: {}> {}", s.history.len() + 1, line.trim());
        if !execute_line(line, s, env, out, errw) {
            all_ok = false;
        }
    }
    if all_ok {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plugin::{builtin_registry, discover_plugins};
    use std::fs;
    use std::io::Cursor;
    use std::path::PathBuf;

    fn fresh(dir: &Path) -> (Session, Environment) {
        (Session::empty(), Environment::new(dir.to_path_buf()))
    }

    fn run_lines(lines: &str, s: &mut Session, env: &mut Environment) -> (String, String, i32) {
        let mut input = Cursor::new(lines.as_bytes().to_vec());
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = repl(&mut input, &mut out, &mut err, s, env);
        (
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
            code,
        )
    }

    #[test]
    fn prompts_number_accepted_statements() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("t.csv"), "a\n1\n").unwrap();
        let (mut s, mut env) = fresh(dir.path());
        let (out, err, code) = run_lines(
            "\n# a comment\nload csv t.csv as T\nshow dataframe\nexit\n",
            &mut s,
            &mut env,
        );
        assert_eq!(code, 0);
        assert!(err.is_empty());
        // Blank and comment lines reuse prompt 1; exit is never recorded.
        assert!(out.contains("TAPPS: 1> TAPPS: 1> TAPPS: 1> TAPPS: 2> "));
        assert!(out.contains("Current Dataframe(s) (n = 1):"));
        assert_eq!(s.history.len(), 2);
        assert_eq!(s.history[0], "load csv t.csv as T");
    }

    #[test]
    fn parse_errors_are_recorded_and_reported() {
        let dir = tempfile::tempdir().unwrap();
        let (mut s, mut env) = fresh(dir.path());
        let (out, err, _) = run_lines("select banana from\nexit\n", &mut s, &mut env);
        assert!(err.starts_with("Error: "));
        assert_eq!(s.history, vec!["select banana from"]);
        assert_eq!(s.ast_history, vec![PARSE_ERROR_AST]);
        // Next prompt number moved on anyway.
        assert!(out.contains("TAPPS: 2> "));
    }

    #[test]
    fn exec_errors_continue_the_loop() {
        let dir = tempfile::tempdir().unwrap();
        let (mut s, mut env) = fresh(dir.path());
        let (_, err, code) = run_lines(
            "describe Missing\nshow history\nexit\n",
            &mut s,
            &mut env,
        );
        assert!(err.contains("no dataframe named \"Missing\""));
        assert_eq!(code, 0);
        assert_eq!(s.history.len(), 2);
    }

    #[test]
    fn displayast_echoes_before_execution() {
        let dir = tempfile::tempdir().unwrap();
        let (mut s, mut env) = fresh(dir.path());
        let (out, _, _) = run_lines(
            "set displayast true\nshow environment\nexit\n",
            &mut s,
            &mut env,
        );
        assert!(out.contains("show environment\ncwd: "));
    }

    #[test]
    fn script_mode_echoes_and_reports_exit_code() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("t.csv"), "a\n1\n").unwrap();
        fs::write(
            dir.path().join("good.txt"),
            "# setup\nload csv t.csv as T\nshow dataframe\n",
        )
        .unwrap();
        let (mut s, mut env) = fresh(dir.path());
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_script(&dir.path().join("good.txt"), &mut out, &mut err, &mut s, &mut env);
        let out = String::from_utf8(out).unwrap();
        assert_eq!(code, 0);
        assert!(out.contains("TAPPS: 1> load csv t.csv as T\n"));
        assert!(out.contains("TAPPS: 2> show dataframe\n"));

        fs::write(dir.path().join("bad.txt"), "describe Nope\nload csv t.csv as U\n").unwrap();
        let (mut s2, mut env2) = fresh(dir.path());
        let mut out2 = Vec::new();
        let mut err2 = Vec::new();
        let code2 =
            run_script(&dir.path().join("bad.txt"), &mut out2, &mut err2, &mut s2, &mut env2);
        assert_eq!(code2, 1);
        // The good statement after the bad one still ran.
        assert!(s2.mdf.contains("U"));
    }

    #[test]
    fn include_failures_abort_before_any_execution() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("t.csv"), "a\n1\n").unwrap();
        fs::write(
            dir.path().join("main.txt"),
            "load csv t.csv as T\n@include missing.txt\n",
        )
        .unwrap();
        let (mut s, mut env) = fresh(dir.path());
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_script(&dir.path().join("main.txt"), &mut out, &mut err, &mut s, &mut env);
        assert_eq!(code, 1);
        assert!(s.mdf.is_empty(), "nothing may execute when an include fails");
        assert!(s.history.is_empty());
        assert!(!String::from_utf8(err).unwrap().is_empty());
    }

    #[test]
    fn repl_and_script_modes_agree() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("t.csv"), "Open,Close\n1,2\n900,40\n").unwrap();
        let script = "\
load csv t.csv as T
cast all in T as nonalpha
select from T as Big where Open > 10
new summarize parameter as p
set parameter dataframe in p as Big
runplugin p
new R dataframe from p results
";
        fs::write(dir.path().join("run.txt"), script).unwrap();

        let registry = builtin_registry();
        let discovery = || discover_plugins(&PathBuf::from("/nonexistent"), &registry);

        let mut s1 = Session::new(discovery());
        let mut env1 = Environment::new(dir.path().to_path_buf());
        for (name, entry) in builtin_registry() {
            s1.plugin_registry.insert(
                name.clone(),
                crate::plugin::PluginDescriptor {
                    manifest: crate::plugin::Manifest {
                        plugin_name: name.clone(),
                        release: 1,
                        description: String::new(),
                        instructions: String::new(),
                    },
                    entry,
                    default_parameters: crate::plugin::ParameterSet::template(&name),
                },
            );
        }
        let mut s2 = s1.clone();
        let mut env2 = Environment::new(dir.path().to_path_buf());

        let mut sink1 = Vec::new();
        let mut sink2 = Vec::new();
        let mut errs = Vec::new();
        let mut input = Cursor::new(format!("{script}exit\n").into_bytes());
        repl(&mut input, &mut sink1, &mut errs, &mut s1, &mut env1);
        run_script(&dir.path().join("run.txt"), &mut sink2, &mut errs, &mut s2, &mut env2);
        assert!(errs.is_empty(), "{}", String::from_utf8_lossy(&errs));

        assert_eq!(s1.mdf, s2.mdf);
        assert_eq!(s1.parameters, s2.parameters);
        assert_eq!(s1.history, s2.history);
        assert_eq!(s1.ast_history, s2.ast_history);
    }
}
