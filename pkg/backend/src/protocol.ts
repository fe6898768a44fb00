// Wire protocol v1: newline-delimited UTF-8 JSON over stdin/stdout.
// Handshake: client sends "HELLO clipforge-detect v1", server answers
// "READY <model-name>". Shutdown: {"op":"quit"}.

export const HELLO = 'HELLO clipforge-detect v1';

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
  label: string;
  score: number;
}

export interface DetectRequest {
  id: number;
  op: 'detect';
  path: string;
}

export interface QuitRequest {
  op: 'quit';
}

export type Request = DetectRequest | QuitRequest;

export interface Response {
  id: number;
  boxes: Box[];
  error?: string;
}

export function parseRequest(line: string): Request {
  const obj = JSON.parse(line);
  if (obj === null || typeof obj !== 'object') {
    throw new Error('request is not an object');
  }
  if (obj.op === 'quit') {
    return { op: 'quit' };
  }
  if (obj.op === 'detect' && typeof obj.id === 'number' && typeof obj.path === 'string') {
    return { id: obj.id, op: 'detect', path: obj.path };
  }
  throw new Error(`unsupported request: ${line}`);
}

export function encodeResponse(res: Response): string {
  return JSON.stringify(res);
}
