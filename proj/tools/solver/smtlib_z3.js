#!/usr/bin/env node
// SMT-LIB v2 front end over the z3 WebAssembly build (npm package z3-solver).
//
// Reads commands from stdin — one s-expression each, possibly spanning lines
// — and evaluates them against a persistent context. Every command produces
// exactly one stdout reply: z3's own output when it prints something, and
// "success" otherwise. Callers enable this framing with
// (set-option :print-success true), which is answered here rather than being
// forwarded (the wasm build ignores it).
//
// Commands are dispatched to z3 strictly one at a time: feeding several
// commands to a single eval_smtlib2_string call corrupts its incremental
// parser state.

'use strict';

const { init } = require('z3-solver');

function lineOf(text) {
  return text.replace(/\s+/g, ' ').trim();
}

async function main() {
  const { Z3, em } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);

  // Z3.eval_smtlib2_string marshals the command with ccall's 'string'
  // converter, which stack-allocates the bytes and reclaims them as soon as
  // the (void, async) ccall returns -- while the solver thread is still
  // parsing them.  Subsequent calls reuse that stack memory and corrupt the
  // in-flight command, which surfaces as sporadic parse errors on perfectly
  // well-formed input.  Pin the bytes in the heap until the eval completes.
  const evalPinned = async (command) => {
    const bytes = Buffer.from(command, 'utf8');
    const ptr = em._malloc(bytes.length + 1);
    em.HEAPU8.set(bytes, ptr);
    em.HEAPU8[ptr + bytes.length] = 0;
    try {
      return await em.async_call(() =>
        em.ccall('async_Z3_eval_smtlib2_string', 'void', ['number', 'number'], [ctx, ptr]));
    } finally {
      em._free(ptr);
    }
  };

  const debugPath = process.env.SMTLIB_Z3_DEBUG
    ? `${process.env.SMTLIB_Z3_DEBUG}.${process.pid}`
    : null;
  const fs = debugPath ? require('fs') : null;
  const trace = (tag, text) => {
    if (fs) fs.appendFileSync(debugPath, `${tag}<<<${text}>>>\n`);
  };

  let pending = Promise.resolve();

  const dispatch = (cmd) => {
    pending = pending.then(async () => {
      if (/^\(\s*exit\s*\)$/.test(cmd)) {
        process.exit(0);
      }
      if (/^\(\s*set-option\s+:print-success/.test(cmd)) {
        process.stdout.write('success\n');
        return;
      }
      let out;
      trace('EVAL', cmd);
      try {
        out = await evalPinned(cmd);
      } catch (e) {
        trace('THROW', String(e));
        process.stdout.write(`(error "${lineOf(String(e)).replace(/"/g, "'")}")\n`);
        return;
      }
      trace('OUT', out || '');
      out = (out || '').trim();
      process.stdout.write(out.length ? out + '\n' : 'success\n');
    });
  };

  // Splits the input stream into balanced s-expressions.
  let buf = '';
  let depth = 0;
  let start = 0;
  let inString = false;
  let inComment = false;

  const feed = (chunk) => {
    buf += chunk;
    let consumed = 0;
    for (let i = start; i < buf.length; i++) {
      const c = buf[i];
      if (inComment) {
        if (c === '\n') inComment = false;
        continue;
      }
      if (inString) {
        if (c === '"') inString = false;
        continue;
      }
      if (c === ';') {
        inComment = true;
      } else if (c === '"') {
        inString = true;
      } else if (c === '(') {
        depth++;
      } else if (c === ')') {
        depth--;
        if (depth < 0) {
          process.stdout.write('(error "unbalanced input")\n');
          depth = 0;
          consumed = i + 1;
        } else if (depth === 0) {
          dispatch(buf.slice(consumed, i + 1).trim());
          consumed = i + 1;
        }
      }
    }
    buf = buf.slice(consumed);
    start = buf.length;
  };

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', feed);
  process.stdin.on('end', () => {
    pending.then(() => process.exit(0));
  });
}

main().catch((e) => {
  process.stderr.write(`smtlib_z3: ${e}\n`);
  process.exit(1);
});
