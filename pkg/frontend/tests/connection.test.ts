import { describe, expect, it } from "vitest";

import { ConsoleConnection } from "../src/connection.js";
import type { Reply, TelemetryFrame } from "../src/protocol.js";
import { FakeScheduler, FakeSocket, makeFrame } from "./helpers.js";

function wired() {
  const sockets: FakeSocket[] = [];
  const scheduler = new FakeScheduler();
  const frames: TelemetryFrame[] = [];
  const replies: Reply[] = [];
  const statuses: string[] = [];
  let reconnects = 0;
  const connection = new ConsoleConnection(
    "ws://test/ws",
    {
      onFrame: (f) => frames.push(f),
      onReply: (r) => replies.push(r),
      onStatus: (s) => statuses.push(s),
      onReconnect: () => reconnects++,
    },
    {
      socketFactory: () => {
        const socket = new FakeSocket();
        sockets.push(socket);
        return socket;
      },
      scheduler: scheduler.schedule,
      backoffMs: 500,
      maxBackoffMs: 4000,
    },
  );
  return {
    connection,
    sockets,
    scheduler,
    frames,
    replies,
    statuses,
    reconnectCount: () => reconnects,
  };
}

describe("ConsoleConnection", () => {
  it("reports connected after open and routes messages by type", () => {
    const { connection, sockets, frames, replies, statuses } = wired();
    connection.connect();
    sockets[0].serverOpen();
    expect(statuses).toEqual(["connecting", "connected"]);
    sockets[0].serverMessage(makeFrame({ window: 2 }));
    sockets[0].serverMessage({ type: "reply", ok: true });
    sockets[0].serverMessage("garbage{");
    expect(frames.map((f) => f.window)).toEqual([2]);
    expect(replies).toEqual([{ type: "reply", ok: true }]);
  });

  it("sends exactly one wire message per send call", () => {
    const { connection, sockets } = wired();
    connection.connect();
    sockets[0].serverOpen();
    connection.send({ type: "set_gain", voice: "bed", db: -12 });
    expect(sockets[0].sent).toEqual([
      JSON.stringify({ type: "set_gain", voice: "bed", db: -12 }),
    ]);
    expect(connection.sentCount).toBe(1);
  });

  it("refuses to send telemetry-type messages", () => {
    const { connection, sockets } = wired();
    connection.connect();
    sockets[0].serverOpen();
    expect(() =>
      connection.send({ type: "telemetry" } as never),
    ).toThrow(/telemetry/);
    expect(sockets[0].sent).toEqual([]);
  });

  it("reconnects with exponential backoff and resets after success", () => {
    const { connection, sockets, scheduler, statuses, reconnectCount } = wired();
    connection.connect();
    sockets[0].serverOpen();

    sockets[0].serverDrop();
    expect(statuses.at(-1)).toBe("disconnected");
    expect(scheduler.runNext()).toBe(500); // first retry
    sockets[1].serverDrop(); // fails before open
    expect(scheduler.runNext()).toBe(1000); // doubled
    sockets[2].serverDrop();
    expect(scheduler.runNext()).toBe(2000);
    sockets[3].serverOpen(); // success resets backoff
    expect(reconnectCount()).toBe(1);

    sockets[3].serverDrop();
    expect(scheduler.runNext()).toBe(500);
    expect(sockets.length).toBe(5);
  });

  it("does not reconnect after a user close", () => {
    const { connection, sockets, scheduler } = wired();
    connection.connect();
    sockets[0].serverOpen();
    connection.close();
    expect(scheduler.tasks.length).toBe(0);
    expect(sockets[0].closed).toBe(true);
    expect(() => connection.send({ type: "snapshot_request" })).toThrow(
      /not connected/,
    );
  });
});
