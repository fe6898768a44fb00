// CLI: clipforge-detector-backend --model PATH [--device cpu] [--min-score 0.25]

import { existsSync } from 'node:fs';
import { Detector } from './detector.js';
import { serve } from './server.js';

interface Args {
  model: string;
  device: string;
  minScore: number;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { model: '', device: 'cpu', minScore: 0.25 };
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case '--model':
        args.model = argv[++i] ?? '';
        break;
      case '--device':
        args.device = argv[++i] ?? '';
        break;
      case '--min-score':
        args.minScore = Number(argv[++i]);
        break;
      default:
        throw new Error(`unknown argument ${argv[i]}`);
    }
  }
  if (!args.model) throw new Error('--model PATH is required');
  if (!existsSync(args.model)) throw new Error(`model not found: ${args.model}`);
  if (args.device !== 'cpu') throw new Error(`unsupported device ${args.device} (cpu only)`);
  if (!(args.minScore >= 0 && args.minScore <= 1)) {
    throw new Error('--min-score must be in [0, 1]');
  }
  return args;
}

async function main(): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const detector = await Detector.open(args.model, args.minScore);
  return serve(detector);
}

main().then((code) => process.exit(code));
