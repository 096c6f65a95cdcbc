/**
 * CSV loading against the documented simlb schemas.
 *
 * Each plot kind consumes exactly one schema; the header must match the
 * documented column list byte for byte, in order. Metrics are never
 * recomputed here: the simulator's CSVs are the single source of truth.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatch";
  }
}

export class EmptyInput extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyInput";
  }
}

export const SUMMARY_HEADER = [
  "run_id", "balancer", "dcs", "vms_per_dc", "tasks",
  "avg_response_ms", "avg_dc_processing_ms", "total_cost_usd", "unfinished",
] as const;

export const HOURLY_HEADER = [
  "run_id", "hour", "tasks", "avg_response_ms", "dc_processing_ms",
  "cost_usd",
] as const;

export const VM_ALLOCATION_HEADER = [
  "run_id", "balancer", "dc_id", "vm_id", "tier", "tasks",
] as const;

export type Row = Record<string, string>;

export function loadCsv(path: string, header: readonly string[]): Row[] {
  const text = readFileSync(path, "utf-8");
  if (text.trim() === "") {
    throw new EmptyInput(`${path}: file is empty`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaMismatch(
      `${path}: ${parsed.errors[0].message} (row ${parsed.errors[0].row})`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new EmptyInput(`${path}: file is empty`);
  }
  const actual = rows[0];
  if (actual.length !== header.length ||
      header.some((col, i) => actual[i] !== col)) {
    throw new SchemaMismatch(
      `${path}: header [${actual.join(",")}] does not match expected ` +
      `[${header.join(",")}]`);
  }
  if (rows.length === 1) {
    throw new EmptyInput(`${path}: no data rows`);
  }
  return rows.slice(1).map((cells) => {
    const row: Row = {};
    header.forEach((col, i) => {
      row[col] = cells[i] ?? "";
    });
    return row;
  });
}

export function num(row: Row, col: string): number {
  const value = Number(row[col]);
  if (!Number.isFinite(value)) {
    throw new SchemaMismatch(
      `non-numeric value ${JSON.stringify(row[col])} in column ${col}`);
  }
  return value;
}
