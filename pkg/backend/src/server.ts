// Single-threaded request loop over stdin/stdout.

import { createInterface } from 'node:readline';
import { HELLO, encodeResponse, parseRequest } from './protocol.js';
import { Detector } from './detector.js';

export async function serve(detector: Detector): Promise<number> {
  const rl = createInterface({ input: process.stdin, terminal: false });
  const write = (line: string) => process.stdout.write(line + '\n');

  let greeted = false;
  for await (const line of rl) {
    if (!line.trim()) continue;
    if (!greeted) {
      if (line.trim() !== HELLO) {
        write('ERR unsupported-version');
        return 1;
      }
      write(`READY ${detector.name}`);
      greeted = true;
      continue;
    }
    let id = -1;
    try {
      const req = parseRequest(line);
      if (req.op === 'quit') {
        return 0;
      }
      id = req.id;
      write(encodeResponse({ id, boxes: detector.detectFile(req.path) }));
    } catch (err) {
      // a single bad request must never take the process down
      write(encodeResponse({ id, boxes: [], error: String(err) }));
    }
  }
  return 0;
}
