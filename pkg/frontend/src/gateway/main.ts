// console-gateway --relay HOST:PORT --listen PORT [--testset CMD]

import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { Gateway } from "./server.js";

function parseArgs(argv: string[]) {
  const out = { relay: "127.0.0.1:10102", listen: 8080, testset: "testset" };
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg === "--relay") out.relay = argv[++i];
    else if (arg === "--listen") out.listen = Number(argv[++i]);
    else if (arg === "--testset") out.testset = argv[++i];
    else {
      console.error(`unknown argument ${arg}`);
      process.exit(2);
    }
  }
  return out;
}

const args = parseArgs(process.argv.slice(2));
const [host, port] = args.relay.split(":");
const here = path.dirname(fileURLToPath(import.meta.url));

const gateway = new Gateway({
  relayHost: host,
  relayPort: Number(port ?? 10102),
  listenPort: args.listen,
  staticDir: path.resolve(here, "../../static"),
  testsetCommand: args.testset.split(" "),
});

gateway.listen().then((actual) => {
  console.log(`console-gateway: http://127.0.0.1:${actual}/ -> relay ${args.relay}`);
});
