public void flush(Writer out) {
    this.buffer.writeTo(out);
    super.flush();
    out.close();
}
