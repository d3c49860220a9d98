public String host(Config config) {
    String name = config.server.address.getHost();
    return name.trim();
}
