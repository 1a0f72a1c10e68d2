//! Terminal dialogue over the same session path as the WebSocket service.

use std::io::{self, BufRead, Write};
use std::sync::Arc;
use std::time::SystemTime;

use persuade_core::dialogue::{OptionView, ProfileChoice};
use persuade_core::pack::ContentPack;
use persuade_core::session::{ServerMessage, Session, SessionSpec};

fn show(out: &mut impl Write, messages: &[ServerMessage]) -> io::Result<Vec<OptionView>> {
    let mut options = Vec::new();
    for m in messages {
        match m {
            ServerMessage::Utterance {
                function,
                technique,
                text,
                options: opts,
                ..
            } => {
                match technique {
                    Some(t) => writeln!(out, "[{function}/{t}] {text}")?,
                    None => writeln!(out, "[{function}] {text}")?,
                }
                for (i, o) in opts.iter().enumerate() {
                    writeln!(out, "  {}) {}", i + 1, o.label)?;
                }
                options = opts.clone();
            }
            ServerMessage::End { summary, .. } => {
                writeln!(out, "-- end of session --")?;
                for (topic, s) in &summary.per_topic {
                    writeln!(out, "  {topic}: knowledge {}, intention {}", s.knowledge, s.intention)?;
                }
            }
            ServerMessage::Error { code, message } => writeln!(out, "! {code}: {message}")?,
        }
    }
    Ok(options)
}

/// Runs a session reading answers from `input`: an option number or id per
/// line. Stops at the end of the dialogue or of the input.
pub fn run(
    pack: Arc<ContentPack>,
    seed: u64,
    profile: ProfileChoice,
    mut input: impl BufRead,
    mut out: impl Write,
) -> io::Result<Session> {
    let spec = SessionSpec {
        id: "repl".into(),
        seed,
        profile,
        created_at: SystemTime::now(),
    };
    let (mut session, first) = Session::start(pack, spec).map_err(io::Error::other)?;
    writeln!(
        out,
        "seed {seed}, profile {}",
        session.state().ethical_profile.as_str()
    )?;
    let mut options = show(&mut out, &first)?;
    let mut line = String::new();
    while !session.is_ended() {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            break;
        }
        let answer = line.trim();
        if answer.is_empty() {
            continue;
        }
        let option = match answer.parse::<usize>() {
            Ok(n) if (1..=options.len()).contains(&n) => options[n - 1].id.clone(),
            _ => answer.to_string(),
        };
        match session.submit_choice(&option) {
            Ok(messages) => options = show(&mut out, &messages)?,
            Err(e) => {
                show(&mut out, &[e.to_message()])?;
            }
        }
    }
    Ok(session)
}
